#pragma once

#include <cstddef>
#include <vector>

#include "stfe/mobility.hpp"
#include "stfe/params.hpp"
#include "stfe/quadrature.hpp"

namespace stfe {

struct FunctionalTolerance {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    // Point beyond which the power-law tail treatment starts. Zero selects
    // max(10 |r|, 100).
    double tail_cut = 0.0;
    int max_panels = 10000;
};

// Which regularized mobility the functionals are built from.
enum class Family { Delta, DeltaEps };

// Pointwise values. The Delta family requires r >= 0 for J and r > 0 otherwise.
double Jdelta(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double Jde(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double Ldelta(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double Lde(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double Gdelta(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double Gde(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double Hde(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double Ide(double r, const ParamSet& p, const FunctionalTolerance& tol = {});
// P(r) = int_0^r J/F = int_0^r L'' F.
double Pde(double r, const ParamSet& p, const FunctionalTolerance& tol = {});

// Family-generic forms of the above.
double J_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double L_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double G_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol = {});
double H_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol = {});

// Integrals of (F_de'')^2: over the whole line (three pieces split at -delta/2
// and delta/2, negative arguments evaluated directly) and over (0, inf) split at
// delta/2.
struct SecondDerivativeEnergy {
    double whole_line = 0.0;
    double half_line = 0.0;
};
SecondDerivativeEnergy fde_second_derivative_energy(const ParamSet& p,
                                                    const FunctionalTolerance& tol = {});

// All functionals on a sorted node set, built by accumulating small interval
// integrals between neighbouring nodes. Nodes 1 (base of L) and, for DeltaEps,
// 0 (base of J, I, P) are inserted when missing. Alongside each functional the
// table keeps the first derivative needed for Hermite interpolation:
// J' = T, L' = A, G' = -D, H' = -1/F.
class FunctionalTable {
public:
    FunctionalTable(Family fam, const ParamSet& p, std::vector<double> nodes,
                    const FunctionalTolerance& tol = {});

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& nodes() const { return x_; }
    // Index of a node; throws PreconditionError when r is not a node.
    std::size_t index_of(double r) const;

    double J(std::size_t i) const { return J_[i]; }
    double T(std::size_t i) const { return T_[i]; }
    double L(std::size_t i) const { return L_[i]; }
    double A(std::size_t i) const { return A_[i]; }
    double G(std::size_t i) const { return G_[i]; }
    double D(std::size_t i) const { return D_[i]; }
    double H(std::size_t i) const { return H_[i]; }
    // Only populated for the DeltaEps family.
    double I(std::size_t i) const { return I_[i]; }
    double P(std::size_t i) const { return P_[i]; }

    Family family() const { return fam_; }
    const ParamSet& params() const { return p_; }

private:
    Family fam_;
    ParamSet p_;
    std::vector<double> x_, J_, T_, L_, A_, G_, D_, H_, I_, P_;
};

}  // namespace stfe
