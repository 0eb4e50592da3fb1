#include "stfe/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "stfe/errors.hpp"
#include "stfe/kernels.hpp"
#include "stfe/solver.hpp"

namespace stfe {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void require_positive(const GridState& s, const char* what) {
    if (!(min_of(s.u) > 0.0)) throw DomainError(std::string(what) + " requires positive values");
}

FunctionalCache& pick_cache(std::unique_ptr<FunctionalCache>& local, FunctionalCache* given,
                            Family fam, const ParamSet& p) {
    if (given) {
        if (given->family() != fam) throw PreconditionError("functional cache family mismatch");
        return *given;
    }
    local = std::make_unique<FunctionalCache>(fam, p);
    return *local;
}
}  // namespace

EntropyVariant entropy_variant_for(MobilityKind kind) {
    switch (kind) {
        case MobilityKind::F0: return EntropyVariant::G0;
        case MobilityKind::Fdelta: return EntropyVariant::Gdelta;
        default: return EntropyVariant::Gde;
    }
}

LogEntropyVariant log_entropy_variant_for(MobilityKind kind) {
    switch (kind) {
        case MobilityKind::F0: return LogEntropyVariant::Exact;
        case MobilityKind::Fdelta: return LogEntropyVariant::Ldelta;
        default: return LogEntropyVariant::Lde;
    }
}

FunctionalCache::FunctionalCache(Family fam, const ParamSet& p, const FunctionalTolerance& tol,
                                 int nodes)
    : fam_(fam), p_(p), tol_(tol), nodes_(nodes) {
    if (nodes < 4) throw PreconditionError("cache needs at least 4 nodes");
}

void FunctionalCache::ensure(double lo, double hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi)) || hi < lo)
        throw PreconditionError("invalid cache range");
    if (covers(lo, hi)) return;
    if (built_) {
        lo = std::min(lo, lo_);
        hi = std::max(hi, hi_);
    }
    if (fam_ == Family::Delta && !(lo > 0.0)) throw DomainError("Delta-family functionals need r > 0");
    const double w = std::max(hi - lo, 0.05 * std::max({1.0, std::abs(lo), std::abs(hi)}));
    double a = lo - 0.25 * w, b = hi + 0.25 * w;
    if (fam_ == Family::Delta) a = std::max(a, 0.5 * lo);
    c_ = fam_ == Family::DeltaEps ? p_.eps : p_.delta;
    s_lo_ = std::asinh(a / c_);
    ds_ = (std::asinh(b / c_) - s_lo_) / (nodes_ - 1);
    std::vector<double> x(nodes_), jac(nodes_);
    for (int i = 0; i < nodes_; ++i) {
        const double s = s_lo_ + i * ds_;
        x[i] = c_ * std::sinh(s);
        jac[i] = c_ * std::cosh(s);  // dr/ds
    }
    x.front() = a;
    x.back() = b;
    FunctionalTable table(fam_, p_, x, tol_);
    for (int k = 0; k < 4; ++k) {
        val_[k].resize(nodes_);
        der_[k].resize(nodes_);
    }
    for (int i = 0; i < nodes_; ++i) {
        const std::size_t t = table.index_of(x[i]);
        const double F = fam_ == Family::DeltaEps ? Fde(x[i], p_).f : Fdelta(x[i], p_).f;
        val_[0][i] = table.J(t); der_[0][i] = jac[i] * table.T(t);
        val_[1][i] = table.L(t); der_[1][i] = jac[i] * table.A(t);
        val_[2][i] = table.G(t); der_[2][i] = -jac[i] * table.D(t);
        val_[3][i] = table.H(t); der_[3][i] = -jac[i] / F;
    }
    lo_ = a;
    hi_ = b;
    built_ = true;
    ++rebuilds_;
}

double FunctionalCache::eval(int which, double r) const {
    if (!built_ || !(r >= lo_ && r <= hi_)) {
        std::ostringstream os;
        os << "cache query r = " << r << " outside [" << lo_ << ", " << hi_ << "]";
        throw PreconditionError(os.str());
    }
    const double s = (std::asinh(r / c_) - s_lo_) / ds_;
    const int i = std::clamp(static_cast<int>(s), 0, nodes_ - 2);
    const double t = std::clamp(s - i, 0.0, 1.0);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const auto& v = val_[which];
    const auto& d = der_[which];
    return h00 * v[i] + h10 * ds_ * d[i] + h01 * v[i + 1] + h11 * ds_ * d[i + 1];
}

double mass(const GridState& s) { return grid_mass(s); }

double energy(const GridState& s) {
    double acc = 0.0;
    for (double d : forward_difference(s.u, s.h)) acc += d * d;
    return 0.5 * s.h * acc;
}

double G0(double r, double n) {
    if (!(r > 0.0)) throw DomainError("G0 requires r > 0");
    return std::pow(r, 2.0 - n) / ((n - 1.0) * (n - 2.0));
}

double entropy_G(const GridState& s, const ParamSet& p, EntropyVariant variant,
                 FunctionalCache* cache) {
    double acc = 0.0;
    if (variant == EntropyVariant::G0) {
        require_positive(s, "entropy_G (G0)");
        for (double v : s.u) acc += G0(v, p.n);
        return s.h * acc;
    }
    const Family fam = variant == EntropyVariant::Gdelta ? Family::Delta : Family::DeltaEps;
    if (fam == Family::Delta) require_positive(s, "entropy_G (Gdelta)");
    std::unique_ptr<FunctionalCache> local;
    FunctionalCache& c = pick_cache(local, cache, fam, p);
    c.ensure(min_of(s.u), max_of(s.u));
    for (double v : s.u) acc += c.G(v);
    return s.h * acc;
}

double log_entropy(const GridState& s, const ParamSet& p, LogEntropyVariant variant,
                   FunctionalCache* cache) {
    double acc = 0.0;
    if (variant == LogEntropyVariant::Exact) {
        require_positive(s, "log_entropy (exact)");
        for (double v : s.u) acc += (v - 1.0) - std::log(v);
        return s.h * acc;
    }
    const Family fam = variant == LogEntropyVariant::Ldelta ? Family::Delta : Family::DeltaEps;
    if (fam == Family::Delta) require_positive(s, "log_entropy (Ldelta)");
    std::unique_ptr<FunctionalCache> local;
    FunctionalCache& c = pick_cache(local, cache, fam, p);
    c.ensure(min_of(s.u), max_of(s.u));
    for (double v : s.u) acc += c.L(v);
    return s.h * acc;
}

Dissipations dissipation_integrals(const GridState& s, const Mobility& F, FunctionalCache* cache) {
    const int m = s.m();
    std::vector<double> f(m), df(m), M(m);
    serial::evaluate_mobility(F, s.u, f, df);
    serial::face_mobility(f, M);
    const auto d3 = third_difference(s.u, s.h);
    const auto lap = discrete_laplacian(s.u, s.h);
    const auto d1 = centered_derivative(s.u, s.h);
    if (cache) cache->ensure(min_of(s.u), max_of(s.u));
    Dissipations out;
    for (int j = 0; j < m; ++j) {
        out.F2_d3u += M[j] * d3[j] * d3[j];
        out.d2u += lap[j] * lap[j];
        const double fpp = F(s.u[j]).d2;
        const double g = d1[j] * d1[j];
        out.Fpp_du4 += fpp * fpp * g * g;
        if (cache) out.Jplus_d2u += std::max(cache->J(s.u[j]), 0.0) * lap[j] * lap[j];
    }
    out.F2_d3u *= s.h;
    out.d2u *= s.h;
    out.Fpp_du4 *= s.h;
    out.Jplus_d2u *= s.h;
    return out;
}

double alpha_entropy_density(double u, double a) {
    if (!(u > 0.0)) throw DomainError("alpha entropy requires u > 0");
    if (a == -1.0) return (u - 1.0) - std::log(u);
    if (a == 0.0) return u * std::log(u) - u + 1.0;
    return ((std::pow(u, a + 1.0) - 1.0) / (a + 1.0) - (u - 1.0)) / a;
}

double default_alpha(double n) { return 1.25 - n; }

double alpha_entropy(const GridState& s, double alpha, double n) {
    if (!(alpha >= 0.5 - n && alpha <= 2.0 - n)) {
        std::ostringstream os;
        os << "alpha = " << alpha << " outside [1/2 - n, 2 - n] = [" << 0.5 - n << ", " << 2.0 - n << "]";
        throw AdmissibilityError(os.str());
    }
    require_positive(s, "alpha_entropy");
    double acc = 0.0;
    for (double v : s.u) acc += alpha_entropy_density(v, alpha);
    return s.h * acc;
}

std::string csv_row(const FunctionalReport& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << r.t << ',' << r.mass << ',' << r.energy << ',' << r.entropy_G << ','
       << r.log_entropy_exact << ',' << r.log_entropy_L << ',' << r.diss.F2_d3u << ','
       << r.diss.d2u << ',' << r.diss.Fpp_du4 << ',' << r.alpha_entropy;
    return os.str();
}

std::unique_ptr<FunctionalCache> make_cache_for(const Mobility& F) {
    if (F.kind() == MobilityKind::Fde)
        return std::make_unique<FunctionalCache>(Family::DeltaEps, F.params());
    if (F.kind() == MobilityKind::Fdelta)
        return std::make_unique<FunctionalCache>(Family::Delta, F.params());
    return nullptr;
}

FunctionalReport report(const GridState& s, const Mobility& F, double alpha,
                        FunctionalCache* cache) {
    const ParamSet& p = F.params();
    const bool positive = min_of(s.u) > 0.0;
    FunctionalReport r;
    r.t = s.t;
    r.mass = mass(s);
    r.energy = energy(s);
    r.diss = dissipation_integrals(s, F, cache);
    r.log_entropy_exact = positive ? log_entropy(s, p, LogEntropyVariant::Exact) : kNaN;
    r.alpha_entropy = positive ? alpha_entropy(s, alpha, p.n) : kNaN;
    switch (F.kind()) {
        case MobilityKind::F0:
            r.entropy_G = positive ? entropy_G(s, p, EntropyVariant::G0) : kNaN;
            r.log_entropy_L = r.log_entropy_exact;
            break;
        case MobilityKind::Fdelta:
            r.entropy_G = positive ? entropy_G(s, p, EntropyVariant::Gdelta, cache) : kNaN;
            r.log_entropy_L = positive ? log_entropy(s, p, LogEntropyVariant::Ldelta, cache) : kNaN;
            break;
        case MobilityKind::Fde:
            r.entropy_G = entropy_G(s, p, EntropyVariant::Gde, cache);
            r.log_entropy_L = log_entropy(s, p, LogEntropyVariant::Lde, cache);
            break;
        default:
            r.entropy_G = kNaN;
            r.log_entropy_L = kNaN;
    }
    return r;
}

std::vector<FunctionalReport> report_series(const Trajectory& tr, double alpha) {
    const Mobility F(tr.config.mobility, tr.config.params);
    auto cache = make_cache_for(F);
    std::vector<FunctionalReport> out;
    if (tr.states.empty()) return out;
    if (cache) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& s : tr.states) {
            lo = std::min(lo, min_of(s.u));
            hi = std::max(hi, max_of(s.u));
        }
        if (cache->family() == Family::DeltaEps || lo > 0.0) cache->ensure(lo, hi);
        else cache.reset();
    }
    for (const auto& s : tr.states) out.push_back(report(s, F, alpha, cache.get()));
    return out;
}

HolderSeminorm holder_seminorm(const std::vector<GridState>& states, double beta_t, double gamma_x) {
    if (states.size() < 3) throw PreconditionError("holder_seminorm needs at least 3 time samples");
    HolderSeminorm out;
    for (std::size_t a = 0; a < states.size(); ++a) {
        for (std::size_t b = a + 1; b < states.size(); ++b) {
            const double dt = std::abs(states[b].t - states[a].t);
            if (dt == 0.0) continue;
            const double w = std::pow(dt, beta_t);
            for (std::size_t j = 0; j < states[a].u.size(); ++j)
                out.temporal = std::max(out.temporal, std::abs(states[b].u[j] - states[a].u[j]) / w);
        }
    }
    for (const auto& s : states) {
        const int m = s.m();
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const int k = j - i;
                const double d = std::min(k, m - k) * s.h;
                out.spatial = std::max(out.spatial, std::abs(s.u[j] - s.u[i]) / std::pow(d, gamma_x));
            }
        }
    }
    return out;
}

HolderSeminorm holder_seminorm(const Trajectory& tr, double beta_t, double gamma_x) {
    return holder_seminorm(tr.states, beta_t, gamma_x);
}

ProductionDissipation production_vs_dissipation(const Trajectory& tr, const NoiseField& field) {
    const Mobility F(tr.config.mobility, tr.config.params);
    ProductionDissipation out;
    const auto& s2 = field.sigma_sq_sum();
    for (const auto& s : tr.states) {
        if (static_cast<int>(s2.size()) != s.m()) throw GridMismatch("noise field grid differs from trajectory");
        const auto d1 = centered_derivative(s.u, s.h);
        double prod = 0.0, diss = 0.0;
        for (int j = 0; j < s.m(); ++j) {
            const double fpp = F(s.u[j]).d2;
            const double g = d1[j] * d1[j];
            const double base = fpp * fpp * g * g;
            prod += s2[j] * base;
            diss += base;
        }
        out.t.push_back(s.t);
        out.production.push_back(0.5 * s.h * prod);
        out.dissipation.push_back(s.h * diss / 3.0);
        out.ratio.push_back(diss > 0.0 ? out.production.back() / out.dissipation.back() : kNaN);
    }
    return out;
}

}  // namespace stfe
