#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stfe/grid.hpp"
#include "stfe/mobility.hpp"
#include "stfe/noise.hpp"
#include "stfe/params.hpp"
#include "stfe/regularized_functionals.hpp"

namespace stfe {

struct Trajectory;

enum class EntropyVariant { G0, Gdelta, Gde };
enum class LogEntropyVariant { Exact, Ldelta, Lde };

// Variants that belong to a mobility (F0 pairs with G0 and the exact log-entropy).
EntropyVariant entropy_variant_for(MobilityKind kind);
LogEntropyVariant log_entropy_variant_for(MobilityKind kind);

// Cubic Hermite interpolant of J, L, G, H on 512 nodes uniform in
// s = asinh(r / c), c = eps (delta for the Delta family), built from a
// FunctionalTable over a padded value range and rebuilt when a query range is
// not covered. The grading resolves the eps-scale rounding of F near 0.
// Derivatives used: J' = T, L' = A, G' = -D, H' = -1/F.
class FunctionalCache {
public:
    FunctionalCache(Family fam, const ParamSet& p, const FunctionalTolerance& tol = {},
                    int nodes = 512);

    // Makes [lo, hi] covered, rebuilding if needed.
    void ensure(double lo, double hi);
    bool covers(double lo, double hi) const { return built_ && lo >= lo_ && hi <= hi_; }

    double J(double r) const { return eval(0, r); }
    double L(double r) const { return eval(1, r); }
    double G(double r) const { return eval(2, r); }
    double H(double r) const { return eval(3, r); }

    Family family() const { return fam_; }
    const ParamSet& params() const { return p_; }
    int rebuilds() const { return rebuilds_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double eval(int which, double r) const;

    Family fam_;
    ParamSet p_;
    FunctionalTolerance tol_;
    int nodes_;
    bool built_ = false;
    int rebuilds_ = 0;
    double lo_ = 0.0, hi_ = 0.0;
    double c_ = 1.0, s_lo_ = 0.0, ds_ = 0.0;
    std::vector<double> val_[4], der_[4];
};

double mass(const GridState& s);
// (1/2) h sum_j ((u_{j+1} - u_j) / h)^2
double energy(const GridState& s);

// G0 is closed form; Gdelta / Gde go through the cache (a local one when null).
double entropy_G(const GridState& s, const ParamSet& p, EntropyVariant variant,
                 FunctionalCache* cache = nullptr);
double log_entropy(const GridState& s, const ParamSet& p, LogEntropyVariant variant,
                   FunctionalCache* cache = nullptr);

// G0(r) = r^{2-n} / ((n-1)(n-2))
double G0(double r, double n);

struct Dissipations {
    double F2_d3u = 0.0;     // h sum_faces M (D+ Lap u)^2, the solver's flux stencil
    double d2u = 0.0;        // h sum (Lap u)^2
    double Jplus_d2u = 0.0;  // h sum J+(u) (Lap u)^2
    double Fpp_du4 = 0.0;    // h sum (F''(u))^2 (D1 u)^4
};

// J+ needs a cache of the matching family; it is skipped (left 0) for mobilities
// without one.
Dissipations dissipation_integrals(const GridState& s, const Mobility& F,
                                   FunctionalCache* cache = nullptr);

// h sum of ((u^{a+1} - 1)/(a+1) - (u - 1)) / a, with the a = -1 and a = 0 limits.
double alpha_entropy_density(double u, double alpha);
double alpha_entropy(const GridState& s, double alpha, double n);
double default_alpha(double n);

struct FunctionalReport {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double entropy_G = 0.0;
    double log_entropy_exact = 0.0;  // NaN when min u <= 0
    double log_entropy_L = 0.0;
    Dissipations diss;
    double alpha_entropy = 0.0;      // NaN when min u <= 0
};

// Column order of the functional series CSV.
inline constexpr const char* kFunctionalColumns =
    "t,mass,energy,entropy_G,log_entropy_exact,log_entropy_L,diss_F2_d3u,diss_d2u,diss_Fpp_du4,alpha_entropy";
std::string csv_row(const FunctionalReport& r);

// Cache of the family matching a mobility, or null for F0 / unit / identity.
std::unique_ptr<FunctionalCache> make_cache_for(const Mobility& F);

FunctionalReport report(const GridState& s, const Mobility& F, double alpha,
                        FunctionalCache* cache);
std::vector<FunctionalReport> report_series(const Trajectory& tr, double alpha);

struct HolderSeminorm {
    double temporal = 0.0;
    double spatial = 0.0;
};

// Empirical sup over sampled pairs of |u(t,x) - u(s,x)| / |t - s|^beta_t and of
// |u(t,x) - u(t,y)| / d(x,y)^gamma_x with periodic distance d.
HolderSeminorm holder_seminorm(const std::vector<GridState>& states, double beta_t,
                               double gamma_x);
HolderSeminorm holder_seminorm(const Trajectory& tr, double beta_t, double gamma_x);

struct ProductionDissipation {
    std::vector<double> t;
    std::vector<double> production;   // (1/2) h sum sigma^2 (F'')^2 (D1 u)^4
    std::vector<double> dissipation;  // (1/3) h sum (F'')^2 (D1 u)^4
    std::vector<double> ratio;        // NaN where the dissipation vanishes
};

ProductionDissipation production_vs_dissipation(const Trajectory& tr, const NoiseField& field);

}  // namespace stfe
