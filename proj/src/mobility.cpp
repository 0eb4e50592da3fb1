#include "stfe/mobility.hpp"

#include <cmath>

#include "stfe/errors.hpp"

namespace stfe {

Jet F0(double r, double n) {
    if (r < 0.0 || std::isnan(r)) throw DomainError("F0 requires r >= 0");
    const double a = 0.5 * n;
    if (r == 0.0) return {0.0, 0.0, kSecondDerivativeAtZero, -kSecondDerivativeAtZero};
    const double base = std::pow(r, a - 3.0);
    return {base * r * r * r, a * base * r * r, a * (a - 1.0) * base * r,
            a * (a - 1.0) * (a - 2.0) * base};
}

// Fdelta(r) = r^{nu/2} / (r^l + delta^l). With q = r^l / (r^l + delta^l) the
// logarithmic derivative is a = r F'/F = nu/2 - l q and r q' = l q (1 - q), which
// gives F'' = F b / r^2 and F''' = F c / r^3 without large intermediate powers.
Jet Fdelta(double r, const ParamSet& p) {
    if (r < 0.0 || std::isnan(r)) throw DomainError("Fdelta requires r >= 0");
    if (r == 0.0) return {0.0, 0.0, kSecondDerivativeAtZero, -kSecondDerivativeAtZero};
    const double l = p.l;
    double q, one_minus_q;
    // F / r^k, evaluated on whichever branch keeps the powers tame.
    auto scaled = [&](int k) {
        if (r >= p.delta) return std::pow(r, 0.5 * p.n - k) * q;
        return std::pow(r, 0.5 * p.nu - k) * std::pow(p.delta, -l) * one_minus_q;
    };
    if (r >= p.delta) {
        const double w = std::pow(p.delta / r, l);
        q = 1.0 / (1.0 + w);
        one_minus_q = w / (1.0 + w);
    } else {
        const double v = std::pow(r / p.delta, l);
        q = v / (1.0 + v);
        one_minus_q = 1.0 / (1.0 + v);
    }
    const double qq = q * one_minus_q;
    const double a = 0.5 * p.nu - l * q;
    const double b = a * a - a - l * l * qq;
    const double rb1 = -l * l * qq * ((2.0 * a - 1.0) + l * (one_minus_q - q));
    const double c = a * b + rb1 - 2.0 * b;
    return {scaled(0), a * scaled(1), b * scaled(2), c * scaled(3)};
}

Jet Keps(double r, double eps) {
    const double K = std::hypot(r, eps);
    const double K1 = r / K;
    const double K2 = eps * eps / (K * K * K);
    const double K3 = -3.0 * K2 * K1 / K;
    return {K, K1, K2, K3};
}

Jet compose(const Jet& g, const Jet& k) {
    return {g.f, g.d1 * k.d1, g.d2 * k.d1 * k.d1 + g.d1 * k.d2,
            g.d3 * k.d1 * k.d1 * k.d1 + 3.0 * g.d2 * k.d1 * k.d2 + g.d1 * k.d3};
}

Jet Fde(double r, const ParamSet& p) {
    const Jet k = Keps(r, p.eps);
    return compose(Fdelta(k.f, p), k);
}

Jet square(const Jet& F) {
    return {F.f * F.f, 2.0 * F.f * F.d1, 2.0 * (F.d1 * F.d1 + F.f * F.d2),
            6.0 * F.d1 * F.d2 + 2.0 * F.f * F.d3};
}

Jet square_of_derivative(const Jet& F) {
    return {F.d1 * F.d1, 2.0 * F.d1 * F.d2, 2.0 * (F.d2 * F.d2 + F.d1 * F.d3), 0.0};
}

MobilityKind parse_mobility(const std::string& name) {
    if (name == "F0") return MobilityKind::F0;
    if (name == "Fdelta") return MobilityKind::Fdelta;
    if (name == "Fde") return MobilityKind::Fde;
    if (name == "unit") return MobilityKind::Unit;
    if (name == "identity") return MobilityKind::Identity;
    throw ConfigError("unknown mobility '" + name + "'");
}

std::string to_string(MobilityKind kind) {
    switch (kind) {
        case MobilityKind::F0: return "F0";
        case MobilityKind::Fdelta: return "Fdelta";
        case MobilityKind::Fde: return "Fde";
        case MobilityKind::Unit: return "unit";
        case MobilityKind::Identity: return "identity";
    }
    return "?";
}

Jet Mobility::operator()(double r) const {
    switch (kind_) {
        case MobilityKind::F0: return F0(r, p_.n);
        case MobilityKind::Fdelta: return Fdelta(r, p_);
        case MobilityKind::Fde: return Fde(r, p_);
        case MobilityKind::Unit: return {1.0, 0.0, 0.0, 0.0};
        case MobilityKind::Identity: return {r, 1.0, 0.0, 0.0};
    }
    return {};
}

}  // namespace stfe
