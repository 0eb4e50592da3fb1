#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "stfe/errors.hpp"

namespace stfe::quad {

struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_panels = 10000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXk[j];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kWk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

// Adaptive bisection over [a, b] with the G7/K15 pair on every panel. The panel
// with the largest error estimate is split until the summed estimate meets
// max(abs_tol, rel_tol * |value|). Throws QuadratureFailure past the panel budget
// or on a non-finite integrand.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    if (a == b) return {};
    if (b < a) {
        Result r = integrate(f, b, a, opt);
        r.value = -r.value;
        return r;
    }
    std::priority_queue<detail::Panel> heap;
    std::vector<detail::Panel> settled;
    detail::Panel first = detail::gk15(f, a, b);
    double value = first.value, error = first.error;
    heap.push(first);
    int panels = 1;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    while (!heap.empty()) {
        if (!std::isfinite(value)) {
            std::ostringstream os;
            os << "non-finite integrand on [" << a << ", " << b << "]";
            throw QuadratureFailure(os.str());
        }
        if (error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) break;
        detail::Panel p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        // Panels at the resolution limit of double precision cannot be refined.
        if (p.b - p.a <= 64.0 * eps * std::max(std::abs(p.a), std::abs(p.b)) || mid <= p.a || mid >= p.b) {
            settled.push_back(p);
            if (heap.empty()) break;
            continue;
        }
        if (panels >= opt.max_panels) {
            std::ostringstream os;
            os << "panel budget " << opt.max_panels << " exhausted on [" << a << ", " << b
               << "], error estimate " << error << " vs value " << value;
            throw QuadratureFailure(os.str());
        }
        detail::Panel l = detail::gk15(f, p.a, mid);
        detail::Panel r = detail::gk15(f, mid, p.b);
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    // Re-sum to shed the drift of the running updates.
    double v = 0.0, e = 0.0;
    for (const auto& p : settled) { v += p.value; e += p.error; }
    while (!heap.empty()) { v += heap.top().value; e += heap.top().error; heap.pop(); }
    return {v, e, panels};
}

// Integral over [a, b] with 0 < a < b after the substitution s = exp(u). Suited
// to integrands with power-law behaviour across many decades.
template <class F>
Result integrate_log(F&& f, double a, double b, const Options& opt = {}) {
    if (!(a > 0.0 && b > 0.0)) throw QuadratureFailure("integrate_log requires positive limits");
    auto g = [&f](double u) {
        const double s = std::exp(u);
        return f(s) * s;
    };
    return integrate(g, std::log(a), std::log(b), opt);
}

// Integral over [a, inf) for a > 0 where f(s) behaves like c s^{-p}, p > 1, at
// infinity. Integrates in log-variable chunks until the power-law remainder
// f(S) S / (p - 1) is negligible, then adds that remainder analytically.
template <class F>
Result integrate_tail(F&& f, double a, double p, const Options& opt = {}) {
    if (!(a > 0.0)) throw QuadratureFailure("integrate_tail requires a > 0");
    if (!(p > 1.0)) throw QuadratureFailure("integrate_tail requires decay exponent > 1");
    constexpr double kChunk = 8.0;  // chunk length in log s
    constexpr double kMaxS = 1e150;
    Result total;
    double lo = a;
    for (;;) {
        const double hi = std::min(lo * std::exp(kChunk), kMaxS);
        Result r = integrate_log(f, lo, hi, opt);
        total.value += r.value;
        total.error += r.error;
        total.panels += r.panels;
        lo = hi;
        const double rem = f(lo) * lo / (p - 1.0);
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total.value));
        if (std::abs(rem) <= 1e-3 * target || lo >= kMaxS) {
            total.value += rem;
            return total;
        }
    }
}

// Integral over (0, b] where f(s) behaves like c s^{p0}, p0 > -1, near zero.
// Mirror image of integrate_tail.
template <class F>
Result integrate_head(F&& f, double b, double p0, const Options& opt = {}) {
    if (!(b > 0.0)) throw QuadratureFailure("integrate_head requires b > 0");
    if (!(p0 > -1.0)) throw QuadratureFailure("integrate_head requires exponent > -1");
    constexpr double kChunk = 8.0;
    constexpr double kMinS = 1e-280;
    Result total;
    double hi = b;
    for (;;) {
        const double lo = std::max(hi * std::exp(-kChunk), kMinS);
        Result r = integrate_log(f, lo, hi, opt);
        total.value += r.value;
        total.error += r.error;
        total.panels += r.panels;
        hi = lo;
        const double rem = f(hi) * hi / (p0 + 1.0);
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total.value));
        if (std::abs(rem) <= 1e-3 * target || hi <= kMinS) {
            total.value += rem;
            return total;
        }
    }
}

}  // namespace stfe::quad
