#pragma once

#include <limits>
#include <string>

#include "stfe/params.hpp"

namespace stfe {

// Value and first three derivatives of a scalar function at one point.
struct Jet {
    double f = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

// F0''(0) and Fdelta''(0) diverge for n < 4 and nu < 4; both report this sentinel.
inline constexpr double kSecondDerivativeAtZero = std::numeric_limits<double>::infinity();

Jet F0(double r, double n);
Jet Fdelta(double r, const ParamSet& p);
Jet Keps(double r, double eps);
Jet Fde(double r, const ParamSet& p);

// Chain rule: derivatives of outer(inner(r)) from outer evaluated at inner(r).
Jet compose(const Jet& outer, const Jet& inner);

// Derivatives of F^2 and of (F')^2 (the latter only through order two).
Jet square(const Jet& F);
Jet square_of_derivative(const Jet& F);

// Mobility family used by the solver. Unit (F = 1) and Identity (F = r) exist as
// test hooks for stencil algebra.
enum class MobilityKind { F0, Fdelta, Fde, Unit, Identity };

MobilityKind parse_mobility(const std::string& name);
std::string to_string(MobilityKind kind);

class Mobility {
public:
    Mobility() = default;
    Mobility(MobilityKind kind, const ParamSet& p) : kind_(kind), p_(p) {}

    Jet operator()(double r) const;
    MobilityKind kind() const { return kind_; }
    const ParamSet& params() const { return p_; }
    // True when negative arguments are admissible.
    bool whole_line() const { return kind_ == MobilityKind::Fde || kind_ == MobilityKind::Unit ||
                                     kind_ == MobilityKind::Identity; }

private:
    MobilityKind kind_ = MobilityKind::Fde;
    ParamSet p_{};
};

}  // namespace stfe
