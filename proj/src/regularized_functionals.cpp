#include "stfe/regularized_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stfe/errors.hpp"

namespace stfe {

namespace {

constexpr double kTiny = 1e-300;

void check_tolerance(const FunctionalTolerance& tol) {
    if (!(tol.rel_tol > 0.0) || !(tol.abs_tol > 0.0))
        throw PreconditionError("quadrature tolerances must be positive");
    if (tol.tail_cut != 0.0 && !(tol.tail_cut >= 1.0))
        throw PreconditionError("tail_cut must be >= 1 (or 0 for automatic)");
    if (tol.max_panels < 1) throw PreconditionError("panel budget must be positive");
}

quad::Options to_options(const FunctionalTolerance& tol) {
    return {tol.rel_tol, tol.abs_tol, tol.max_panels};
}

struct Profile {
    Family fam;
    ParamSet p;

    Jet F(double s) const { return fam == Family::DeltaEps ? Fde(s, p) : Fdelta(s, p); }
    double f(double s) const {
        const double v = F(s).d2;
        return v * v;
    }
    double inv_F2(double s) const {
        const double v = F(s).f;
        return 1.0 / (v * v);
    }
    double inv_F(double s) const { return 1.0 / F(s).f; }
};

// Integral over [a, b] (either orientation). Pieces away from the origin use
// the logarithmic substitution, which keeps the panel count flat across decades.
template <class Fn>
double seg(const Profile& pr, Fn&& fn, double a, double b, const quad::Options& opt) {
    if (a == b) return 0.0;
    if (b < a) return -seg(pr, fn, b, a, opt);
    if (pr.fam == Family::Delta) {
        if (!(a > 0.0)) throw DomainError("Delta-family integral must stay on r > 0");
        return quad::integrate_log(fn, a, b, opt).value;
    }
    const double e = pr.p.eps;
    double cuts[5] = {a, std::clamp(-e, a, b), std::clamp(0.0, a, b), std::clamp(e, a, b), b};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double x = cuts[k], y = cuts[k + 1];
        if (!(y > x)) continue;
        if (x >= e) {
            total += quad::integrate_log(fn, x, y, opt).value;
        } else if (y <= -e) {
            auto mirrored = [&fn](double t) { return fn(-t); };
            total += quad::integrate_log(mirrored, -y, -x, opt).value;
        } else {
            total += quad::integrate(fn, x, y, opt).value;
        }
    }
    return total;
}

double cut_for(const FunctionalTolerance& tol, double r) {
    if (tol.tail_cut > 0.0) return std::max(tol.tail_cut, 2.0 * std::abs(r));
    return std::max(10.0 * std::abs(r), 100.0);
}

// Tighter options for integrals nested inside an outer quadrature.
FunctionalTolerance inner(const FunctionalTolerance& tol) {
    FunctionalTolerance t = tol;
    t.rel_tol = tol.rel_tol * 1e-2;
    t.abs_tol = tol.abs_tol * 1e-2;
    return t;
}

// T(x) = int_x^inf (F'')^2 for x >= 0.
double T_point(const Profile& pr, double x, const FunctionalTolerance& tol) {
    const auto opt = to_options(tol);
    const double cut = cut_for(tol, x);
    auto f = [&pr](double s) { return pr.f(s); };
    return seg(pr, f, x, cut, opt) + quad::integrate_tail(f, cut, 4.0 - pr.p.n, opt).value;
}

double J_point(const Profile& pr, double r, const FunctionalTolerance& tol) {
    const auto opt = to_options(tol);
    if (r == 0.0) return 0.0;
    if (pr.fam == Family::Delta) {
        if (r < 0.0) throw DomainError("Jdelta requires r >= 0");
        auto sf = [&pr](double s) { return s * pr.f(s); };
        const double near = quad::integrate_head(sf, r, pr.p.nu - 3.0, opt).value;
        return near + r * T_point(pr, r, tol);
    }
    if (r > 0.0) {
        auto sf = [&pr](double s) { return s * pr.f(s); };
        return seg(pr, sf, 0.0, r, opt) + r * T_point(pr, r, tol);
    }
    const double a = -r;
    auto wf = [&pr, a](double s) { return (a - s) * pr.f(s); };
    return -(a * T_point(pr, 0.0, tol) + seg(pr, wf, 0.0, a, opt));
}

double L_point(const Profile& pr, double r, const FunctionalTolerance& tol) {
    if (pr.fam == Family::Delta && !(r > 0.0)) throw DomainError("Ldelta requires r > 0");
    const auto opt = to_options(tol);
    const auto in = inner(tol);
    auto g = [&pr, &in](double s) { return J_point(pr, s, in) * pr.inv_F2(s); };
    if (r >= 1.0) {
        return seg(pr, [&](double s) { return (r - s) * g(s); }, 1.0, r, opt);
    }
    return seg(pr, [&](double s) { return (s - r) * g(s); }, r, 1.0, opt);
}

double G_point(const Profile& pr, double r, const FunctionalTolerance& tol) {
    if (pr.fam == Family::Delta && !(r > 0.0)) throw DomainError("Gdelta requires r > 0");
    const auto opt = to_options(tol);
    const double cut = cut_for(tol, r);
    auto w = [&pr, r](double s) { return (s - r) * pr.inv_F2(s); };
    return seg(pr, w, r, cut, opt) + quad::integrate_tail(w, cut, pr.p.n - 1.0, opt).value;
}

// D(r) = int_r^inf 1/F^2 = -G'(r).
double D_point(const Profile& pr, double r, const FunctionalTolerance& tol) {
    const auto opt = to_options(tol);
    const double cut = cut_for(tol, r);
    auto w = [&pr](double s) { return pr.inv_F2(s); };
    return seg(pr, w, r, cut, opt) + quad::integrate_tail(w, cut, pr.p.n, opt).value;
}

double H_point(const Profile& pr, double r, const FunctionalTolerance& tol) {
    if (pr.fam == Family::Delta && !(r > 0.0)) throw DomainError("Hdelta requires r > 0");
    const auto opt = to_options(tol);
    const double cut = cut_for(tol, r);
    auto w = [&pr](double s) { return pr.inv_F(s); };
    return seg(pr, w, r, cut, opt) + quad::integrate_tail(w, cut, 0.5 * pr.p.n, opt).value;
}

double I_point(const Profile& pr, double r, const FunctionalTolerance& tol) {
    const auto opt = to_options(tol);
    const auto in = inner(tol);
    auto w = [&pr, &in](double s) {
        const Jet F = pr.F(s);
        return J_point(pr, s, in) * F.d1 / F.f;
    };
    return seg(pr, w, 0.0, r, opt);
}

double P_point(const Profile& pr, double r, const FunctionalTolerance& tol) {
    const auto opt = to_options(tol);
    const auto in = inner(tol);
    auto w = [&pr, &in](double s) { return J_point(pr, s, in) / pr.F(s).f; };
    return seg(pr, w, 0.0, r, opt);
}

Profile make(Family fam, const ParamSet& p, const FunctionalTolerance& tol) {
    check_tolerance(tol);
    return {fam, p};
}

}  // namespace

double J_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return J_point(make(fam, p, tol), r, tol);
}
double L_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return L_point(make(fam, p, tol), r, tol);
}
double G_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return G_point(make(fam, p, tol), r, tol);
}
double H_of(Family fam, double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return H_point(make(fam, p, tol), r, tol);
}

double Jdelta(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return J_of(Family::Delta, r, p, tol);
}
double Jde(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return J_of(Family::DeltaEps, r, p, tol);
}
double Ldelta(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return L_of(Family::Delta, r, p, tol);
}
double Lde(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return L_of(Family::DeltaEps, r, p, tol);
}
double Gdelta(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return G_of(Family::Delta, r, p, tol);
}
double Gde(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return G_of(Family::DeltaEps, r, p, tol);
}
double Hde(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return H_of(Family::DeltaEps, r, p, tol);
}
double Ide(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return I_point(make(Family::DeltaEps, p, tol), r, tol);
}
double Pde(double r, const ParamSet& p, const FunctionalTolerance& tol) {
    return P_point(make(Family::DeltaEps, p, tol), r, tol);
}

SecondDerivativeEnergy fde_second_derivative_energy(const ParamSet& p,
                                                    const FunctionalTolerance& tol) {
    const Profile pr = make(Family::DeltaEps, p, tol);
    const auto opt = to_options(tol);
    const double h = 0.5 * p.delta;
    const double cut = cut_for(tol, 0.0);
    const double p_tail = 4.0 - p.n;
    auto f = [&pr](double s) { return pr.f(s); };
    auto f_neg = [&pr](double t) { return pr.f(-t); };

    // Negative arguments are evaluated as they are, not folded by symmetry.
    const double left = seg(pr, f, -cut, -h, opt) + quad::integrate_tail(f_neg, cut, p_tail, opt).value;
    const double middle = seg(pr, f, -h, h, opt);
    const double right = seg(pr, f, h, cut, opt) + quad::integrate_tail(f, cut, p_tail, opt).value;
    const double half = seg(pr, f, 0.0, h, opt) + right;
    return {left + middle + right, half};
}

FunctionalTable::FunctionalTable(Family fam, const ParamSet& p, std::vector<double> nodes,
                                 const FunctionalTolerance& tol)
    : fam_(fam), p_(p) {
    const Profile pr = make(fam, p, tol);
    nodes.push_back(1.0);
    if (fam == Family::DeltaEps) nodes.push_back(0.0);
    for (double v : nodes) {
        if (!std::isfinite(v)) throw PreconditionError("non-finite table node");
        if (fam == Family::Delta && !(v > 0.0))
            throw DomainError("Delta-family table nodes must be positive");
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    x_ = std::move(nodes);
    const std::size_t N = x_.size();
    J_.assign(N, 0.0); T_.assign(N, 0.0); L_.assign(N, 0.0); A_.assign(N, 0.0);
    G_.assign(N, 0.0); D_.assign(N, 0.0); H_.assign(N, 0.0);
    I_.assign(N, 0.0); P_.assign(N, 0.0);

    // Per-interval options: intervals are short, so the relative target is tight
    // and the absolute floor follows the size of the running sum.
    auto local = [&tol](double scale) {
        return quad::Options{std::min(tol.rel_tol, 1e-12), std::max(1e-15 * std::abs(scale), kTiny),
                             tol.max_panels};
    };
    auto f = [&pr](double s) { return pr.f(s); };

    // T = J' from the right.
    T_[N - 1] = T_point(pr, x_[N - 1], tol);
    for (std::size_t i = N - 1; i-- > 0;) {
        T_[i] = T_[i + 1] + seg(pr, f, x_[i], x_[i + 1], local(T_[i + 1]));
    }

    // J by Taylor steps with J' = T and J'' = -(F'')^2.
    std::size_t j0 = 0;
    if (fam == Family::DeltaEps) {
        j0 = index_of(0.0);
        J_[j0] = 0.0;
    } else {
        J_[0] = J_point(pr, x_[0], tol);
    }
    for (std::size_t i = j0; i + 1 < N; ++i) {
        const double a = x_[i], b = x_[i + 1];
        const double step = (b - a) * T_[i];
        auto w = [&pr, b](double s) { return (b - s) * pr.f(s); };
        J_[i + 1] = J_[i] + step - seg(pr, w, a, b, local(std::abs(J_[i]) + std::abs(step)));
    }
    for (std::size_t i = j0; i-- > 0;) {
        const double a = x_[i], b = x_[i + 1];
        const double step = (b - a) * T_[i + 1];
        auto w = [&pr, a](double s) { return (s - a) * pr.f(s); };
        J_[i] = J_[i + 1] - (step + seg(pr, w, a, b, local(std::abs(J_[i + 1]) + std::abs(step))));
    }

    // J inside [x_i, x_{i+1}] from the left node.
    auto J_local = [&](std::size_t i, double s) {
        const double a = x_[i];
        const double lin = J_[i] + (s - a) * T_[i];
        auto w = [&pr, s](double t) { return (s - t) * pr.f(t); };
        return lin - seg(pr, w, a, s, local(std::abs(lin) + std::abs(J_[i])));
    };

    // L and A = L' from node 1 with L'' = J / F^2.
    const std::size_t j1 = index_of(1.0);
    for (std::size_t i = j1; i + 1 < N; ++i) {
        const double a = x_[i], b = x_[i + 1];
        auto g = [&, i](double s) { return J_local(i, s) * pr.inv_F2(s); };
        const double dA = seg(pr, g, a, b, local(A_[i]));
        auto wg = [&, b](double s) { return (b - s) * g(s); };
        const double step = (b - a) * A_[i];
        A_[i + 1] = A_[i] + dA;
        L_[i + 1] = L_[i] + step + seg(pr, wg, a, b, local(std::abs(L_[i]) + std::abs(step)));
    }
    for (std::size_t i = j1; i-- > 0;) {
        const double a = x_[i], b = x_[i + 1];
        auto g = [&, i](double s) { return J_local(i, s) * pr.inv_F2(s); };
        const double dA = seg(pr, g, a, b, local(A_[i + 1]));
        auto wg = [&, a](double s) { return (s - a) * g(s); };
        const double step = (b - a) * A_[i + 1];
        A_[i] = A_[i + 1] - dA;
        L_[i] = L_[i + 1] - step + seg(pr, wg, a, b, local(std::abs(L_[i + 1]) + std::abs(step)));
    }

    // I and P from node 0 (DeltaEps only).
    if (fam == Family::DeltaEps) {
        auto dI = [&](std::size_t i, double scale) {
            auto w = [&, i](double s) {
                const Jet F = pr.F(s);
                return J_local(i, s) * F.d1 / F.f;
            };
            return seg(pr, w, x_[i], x_[i + 1], local(scale));
        };
        auto dP = [&](std::size_t i, double scale) {
            auto w = [&, i](double s) { return J_local(i, s) / pr.F(s).f; };
            return seg(pr, w, x_[i], x_[i + 1], local(scale));
        };
        for (std::size_t i = j0; i + 1 < N; ++i) {
            I_[i + 1] = I_[i] + dI(i, I_[i]);
            P_[i + 1] = P_[i] + dP(i, P_[i]);
        }
        for (std::size_t i = j0; i-- > 0;) {
            I_[i] = I_[i + 1] - dI(i, I_[i + 1]);
            P_[i] = P_[i + 1] - dP(i, P_[i + 1]);
        }
    } else {
        std::fill(I_.begin(), I_.end(), std::nan(""));
        std::fill(P_.begin(), P_.end(), std::nan(""));
    }

    // G, D = -G', H from the right.
    G_[N - 1] = G_point(pr, x_[N - 1], tol);
    D_[N - 1] = D_point(pr, x_[N - 1], tol);
    H_[N - 1] = H_point(pr, x_[N - 1], tol);
    auto inv2 = [&pr](double s) { return pr.inv_F2(s); };
    auto inv1 = [&pr](double s) { return pr.inv_F(s); };
    for (std::size_t i = N - 1; i-- > 0;) {
        const double a = x_[i], b = x_[i + 1];
        auto w = [&pr, a](double s) { return (s - a) * pr.inv_F2(s); };
        const double step = (b - a) * D_[i + 1];
        G_[i] = G_[i + 1] + step + seg(pr, w, a, b, local(G_[i + 1]));
        D_[i] = D_[i + 1] + seg(pr, inv2, a, b, local(D_[i + 1]));
        H_[i] = H_[i + 1] + seg(pr, inv1, a, b, local(H_[i + 1]));
    }
}

std::size_t FunctionalTable::index_of(double r) const {
    auto it = std::lower_bound(x_.begin(), x_.end(), r);
    if (it == x_.end() || *it != r) {
        std::ostringstream os;
        os << "r = " << r << " is not a table node";
        throw PreconditionError(os.str());
    }
    return static_cast<std::size_t>(it - x_.begin());
}

}  // namespace stfe
