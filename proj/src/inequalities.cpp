#include "stfe/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "stfe/errors.hpp"
#include "stfe/mobility.hpp"

namespace stfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pos(double r) { return r > 0.0 ? r : 0.0; }
double neg(double r) { return r < 0.0 ? -r : 0.0; }

// Functionals at a point, from the table when one is attached.
double fJ(const BoundPoint& q) { return q.table ? q.table->J(q.index) : Jde(q.r, *q.p); }
double fL(const BoundPoint& q) { return q.table ? q.table->L(q.index) : Lde(q.r, *q.p); }
double fG(const BoundPoint& q) { return q.table ? q.table->G(q.index) : Gde(q.r, *q.p); }
double fH(const BoundPoint& q) { return q.table ? q.table->H(q.index) : Hde(q.r, *q.p); }
double fI(const BoundPoint& q) { return q.table ? q.table->I(q.index) : Ide(q.r, *q.p); }
double fP(const BoundPoint& q) { return q.table ? q.table->P(q.index) : Pde(q.r, *q.p); }

Jet Fd(const BoundPoint& q) { return Fdelta(q.r, *q.p); }
Jet Fe(const BoundPoint& q) { return Fde(q.r, *q.p); }
double K(const BoundPoint& q) { return std::hypot(q.r, q.p->eps); }
double one(const BoundPoint&) { return 1.0; }

// F^{1/2} (F'')^{3/2}; NaN when F'' < 0, which the scan reports as a failure.
double half_three_halves(const BoundPoint& q) {
    const Jet F = Fe(q);
    return std::sqrt(F.f) * std::pow(F.d2, 1.5);
}

std::vector<BoundSpec> build_registry() {
    using D = BoundDomain;
    constexpr std::uint8_t both = kUniformDelta | kUniformEps;
    constexpr std::uint8_t eps_only = kUniformEps;
    std::vector<BoundSpec> R;
    auto add = [&R](int id, std::string st, D dom, BoundExpr l, BoundExpr r, std::uint8_t u,
                    std::optional<double> exact = std::nullopt, bool fn = false) {
        R.push_back(BoundSpec{id, std::move(st), dom, l, r, u, exact, fn});
    };

    add(110, "|F_d'(r)| <~ r^(n/2-1)", D::Positive,
        [](const BoundPoint& q) { return std::abs(Fd(q).d1); },
        [](const BoundPoint& q) { return std::pow(q.r, 0.5 * q.p->n - 1.0); }, both);
    add(109, "|F_d''(r)| <~ r^(n/2-2)", D::Positive,
        [](const BoundPoint& q) { return std::abs(Fd(q).d2); },
        [](const BoundPoint& q) { return std::pow(q.r, 0.5 * q.p->n - 2.0); }, both);
    add(123, "(F_de'')^2 <~ K^(n-4)", D::All,
        [](const BoundPoint& q) { const double v = Fe(q).d2; return v * v; },
        [](const BoundPoint& q) { return std::pow(K(q), q.p->n - 4.0); }, both);
    add(134, "|F_de''| <~ K^(n/2-2)", D::All,
        [](const BoundPoint& q) { return std::abs(Fe(q).d2); },
        [](const BoundPoint& q) { return std::pow(K(q), 0.5 * q.p->n - 2.0); }, both);
    add(145, "(r+eps)/sqrt2 <= K <= r+eps", D::Positive,
        [](const BoundPoint& q) {
            const double s = q.r + q.p->eps, k = K(q);
            return std::max(k / s, s / (std::sqrt(2.0) * k));
        },
        one, both, 1.0);
    add(130, "|F_d'(r)| <~ r^(nu/2-1) / delta^l", D::Positive,
        [](const BoundPoint& q) { return std::abs(Fd(q).d1); },
        [](const BoundPoint& q) {
            return std::pow(q.r, 0.5 * q.p->nu - 1.0) / std::pow(q.p->delta, q.p->l);
        },
        both);
    add(131, "|F_d''(r)| <~ r^(nu/2-2) / delta^l", D::Positive,
        [](const BoundPoint& q) { return std::abs(Fd(q).d2); },
        [](const BoundPoint& q) {
            return std::pow(q.r, 0.5 * q.p->nu - 2.0) / std::pow(q.p->delta, q.p->l);
        },
        both);
    add(146, "F_d(r) <= r^(n/2)", D::Positive,
        [](const BoundPoint& q) { return Fd(q).f; },
        [](const BoundPoint& q) { return std::pow(q.r, 0.5 * q.p->n); }, both, 1.0);
    add(147, "F_d(r) <= delta^-l r^(nu/2)", D::Positive,
        [](const BoundPoint& q) { return Fd(q).f; },
        [](const BoundPoint& q) {
            return std::pow(q.r, 0.5 * q.p->nu) / std::pow(q.p->delta, q.p->l);
        },
        both, 1.0);
    add(46, "F_de(r) >= F_d(r) >= r^(n/2) / 2, r >= delta", D::AtLeastDelta,
        [](const BoundPoint& q) {
            const double fd = Fd(q).f;
            return std::max(fd / Fe(q).f, 0.5 * std::pow(q.r, 0.5 * q.p->n) / fd);
        },
        one, both, 1.0);
    add(47, "F_de(r) >= F_d(r) >= r^(nu/2) / (2 delta^l), 0 < r < delta", D::BelowDelta,
        [](const BoundPoint& q) {
            const double fd = Fd(q).f;
            const double low = std::pow(q.r, 0.5 * q.p->nu) / (2.0 * std::pow(q.p->delta, q.p->l));
            return std::max(fd / Fe(q).f, low / fd);
        },
        one, both, 1.0);
    add(32, "J+(r) <~ r_+^(n-2)", D::Positive,
        [](const BoundPoint& q) { return pos(fJ(q)); },
        [](const BoundPoint& q) { return std::pow(q.r, q.p->n - 2.0); }, both, std::nullopt, true);
    add(37, "J-(r) <~_delta r_-", D::Negative,
        [](const BoundPoint& q) { return neg(fJ(q)); },
        [](const BoundPoint& q) { return neg(q.r); }, eps_only, std::nullopt, true);
    add(36, "|I(r)| <~ r_+^(n-2) + C_delta r_-", D::All,
        [](const BoundPoint& q) { return std::abs(fI(q)); },
        [](const BoundPoint& q) { return std::pow(pos(q.r), q.p->n - 2.0) + neg(q.r); }, eps_only,
        std::nullopt, true);
    add(43, "|int_0^r L'' F| <~ r_+^(n/2-1) + C_delta (r_-^(2-n/2) + r_-^(2-nu/2))", D::All,
        [](const BoundPoint& q) { return std::abs(fP(q)); },
        [](const BoundPoint& q) {
            if (q.r > 0.0) return std::pow(q.r, 0.5 * q.p->n - 1.0);
            if (q.r == 0.0) return 0.0;
            const double m = -q.r;
            return std::pow(m, 2.0 - 0.5 * q.p->n) + std::pow(m, 2.0 - 0.5 * q.p->nu);
        },
        eps_only, std::nullopt, true);
    add(139, "J/F_de <~ r^(n/2-2), r >= delta", D::AtLeastDelta,
        [](const BoundPoint& q) { return fJ(q) / Fe(q).f; },
        [](const BoundPoint& q) { return std::pow(q.r, 0.5 * q.p->n - 2.0); }, both, std::nullopt,
        true);
    add(138, "J/F_de <~ r^(n/2-2), 0 < r < delta", D::BelowDelta,
        [](const BoundPoint& q) { return fJ(q) / Fe(q).f; },
        [](const BoundPoint& q) { return std::pow(q.r, 0.5 * q.p->n - 2.0); }, both, std::nullopt,
        true);
    add(189, "|J|/F_de <~_delta r_-^(1-n/2) + r_-^(1-nu/2), r < 0", D::Negative,
        [](const BoundPoint& q) { return std::abs(fJ(q)) / Fe(q).f; },
        [](const BoundPoint& q) {
            const double m = -q.r;
            return std::pow(m, 1.0 - 0.5 * q.p->n) + std::pow(m, 1.0 - 0.5 * q.p->nu);
        },
        eps_only, std::nullopt, true);
    add(142, "L+(r) <= (r-1) - log r, r >= delta", D::AtLeastDelta,
        [](const BoundPoint& q) { return pos(fL(q)); },
        [](const BoundPoint& q) { return (q.r - 1.0) - std::log(q.r); }, both, 1.0, true);
    add(143, "L-(r) <~_delta (G(r) + 1) r_-", D::Negative,
        [](const BoundPoint& q) { return neg(fL(q)); },
        [](const BoundPoint& q) { return (fG(q) + 1.0) * neg(q.r); }, eps_only, std::nullopt, true);
    add(149, "H^2 <~ G", D::All,
        [](const BoundPoint& q) { const double h = fH(q); return h * h; },
        fG, both, std::nullopt, true);
    add(153, "|log F_de| <~ |log(r+eps)| + 1, r >= 0 and K >= delta", D::NonNegativeKge,
        [](const BoundPoint& q) { return std::abs(std::log(Fe(q).f)); },
        [](const BoundPoint& q) { return std::abs(std::log(q.r + q.p->eps)) + 1.0; }, both);
    add(156, "|log F_de| <~ G + |r| + 1", D::All,
        [](const BoundPoint& q) { return std::abs(std::log(Fe(q).f)); },
        [](const BoundPoint& q) { return fG(q) + std::abs(q.r) + 1.0; }, both, std::nullopt, true);
    add(51, "(F_d')^2 <~ F_d F_d''", D::Positive,
        [](const BoundPoint& q) { const double v = Fd(q).d1; return v * v; },
        [](const BoundPoint& q) { const Jet F = Fd(q); return F.f * F.d2; }, both);
    add(53, "|((F_de')^2)'| <~ F_de^(1/2) (F_de'')^(3/2)", D::All,
        [](const BoundPoint& q) { return std::abs(square_of_derivative(Fe(q)).d1); },
        half_three_halves, both);
    add(54, "|(F_de^2)'''| <~ F_de^(1/2) (F_de'')^(3/2)", D::All,
        [](const BoundPoint& q) { return std::abs(square(Fe(q)).d3); }, half_three_halves, both);
    add(56, "n^2 r^nu + delta^(2l) nu^2 r^n <~ polynomial with positive leading terms",
        D::Positive, [](const BoundPoint& q) { return product_bound_lhs(q.r, *q.p); },
        [](const BoundPoint& q) { return product_bound_rhs(q.r, *q.p); }, both);
    add(57, "(F_de')^2 <~ F_de F_de''", D::All,
        [](const BoundPoint& q) { const double v = Fe(q).d1; return v * v; },
        [](const BoundPoint& q) { const Jet F = Fe(q); return F.f * F.d2; }, both);
    add(58, "|(F_de^2)''| <~ F_de F_de''", D::All,
        [](const BoundPoint& q) { return std::abs(square(Fe(q)).d2); },
        [](const BoundPoint& q) { const Jet F = Fe(q); return F.f * F.d2; }, both);
    add(160, "F_de^(1/2) (F_de'')^(3/2) <~_delta 1", D::All, half_three_halves, one, eps_only);
    add(161, "int (F_de'')^2 dr <~_delta 1", D::Scalar,
        [](const BoundPoint& q) { return fde_second_derivative_energy(*q.p).whole_line; }, one,
        eps_only);
    add(19, "|(F_de^2)'''| <~_delta 1", D::All,
        [](const BoundPoint& q) { return std::abs(square(Fe(q)).d3); }, one, eps_only);
    add(20, "|((F_de')^2)'| <~_delta 1", D::All,
        [](const BoundPoint& q) { return std::abs(square_of_derivative(Fe(q)).d1); }, one,
        eps_only);
    add(21, "(F_de')^2 <~ |r|^(n-2) + 1", D::All,
        [](const BoundPoint& q) { const double v = Fe(q).d1; return v * v; },
        [](const BoundPoint& q) { return std::pow(std::abs(q.r), q.p->n - 2.0) + 1.0; }, both);
    add(22, "|(F_de^2)''| <~ |r|^(n-2) + 1", D::All,
        [](const BoundPoint& q) { return std::abs(square(Fe(q)).d2); },
        [](const BoundPoint& q) { return std::pow(std::abs(q.r), q.p->n - 2.0) + 1.0; }, both);
    add(23, "F_de^2 <~ |r|^n + 1", D::All,
        [](const BoundPoint& q) { const double v = Fe(q).f; return v * v; },
        [](const BoundPoint& q) { return std::pow(std::abs(q.r), q.p->n) + 1.0; }, both);
    return R;
}

struct ScanResult {
    double max_ratio = 0.0;
    double witness = 0.0;
    long points = 0;
    std::string problem;
};

// Ratio at one point; +inf marks a violated or undefined point. Points where
// both sides vanish are removable and skipped (returns NaN).
double ratio_at(const BoundSpec& spec, const BoundPoint& q, std::string* problem) {
    const double l = spec.lhs(q), r = spec.rhs(q);
    if (!std::isfinite(l) || !std::isfinite(r)) {
        if (problem && problem->empty()) {
            std::ostringstream os;
            os << "non-finite value at r = " << q.r << " (lhs " << l << ", rhs " << r << ")";
            *problem = os.str();
        }
        return kInf;
    }
    if (r <= 0.0) {
        if (l == 0.0) return std::numeric_limits<double>::quiet_NaN();
        if (problem && problem->empty()) {
            std::ostringstream os;
            os << "non-positive right side " << r << " at r = " << q.r;
            *problem = os.str();
        }
        return kInf;
    }
    return l / r;
}

ScanResult scan(const BoundSpec& spec, const ParamSet& p, const std::vector<double>& args,
                const FunctionalTable* table) {
    ScanResult out;
    BoundPoint q;
    q.p = &p;
    auto visit = [&](double r) {
        q.r = r;
        const double v = ratio_at(spec, q, &out.problem);
        if (std::isnan(v)) return;
        ++out.points;
        if (v > out.max_ratio || out.points == 1) {
            out.max_ratio = v;
            out.witness = r;
        }
    };
    if (spec.domain == BoundDomain::Scalar) {
        visit(0.0);
        return out;
    }
    for (double r : args) {
        if (!in_domain(spec.domain, r, p)) continue;
        if (table) {
            q.table = table;
            q.index = table->index_of(r);
        }
        visit(r);
    }
    return out;
}

// Base sets followed by their sweeps, deduplicated in first-seen order.
std::vector<ParamSet> parameter_sets(const ScanGrid& grid) {
    std::vector<ParamSet> out;
    auto same = [](const ParamSet& a, const ParamSet& b) {
        return a.n == b.n && a.nu == b.nu && a.delta == b.delta && a.eps == b.eps;
    };
    auto push = [&](const ParamSet& p) {
        for (const auto& q : out)
            if (same(q, p)) return;
        out.push_back(p);
    };
    for (const auto& base : grid.params) {
        push(base);
        for (double d : grid.deltas)
            for (double e : grid.epsilons) push(validate_params(base.n, base.nu, d, e));
    }
    return out;
}

struct Context {
    std::vector<ParamSet> sets;
    std::vector<std::vector<double>> args;
    std::vector<std::unique_ptr<FunctionalTable>> tables;
};

Context make_context(const ScanGrid& grid, bool with_tables) {
    Context c;
    c.sets = parameter_sets(grid);
    const int S = static_cast<int>(c.sets.size());
    c.args.resize(S);
    c.tables.resize(S);
    for (int i = 0; i < S; ++i) c.args[i] = scan_arguments(grid, c.sets[i]);
    if (with_tables) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < S; ++i)
            c.tables[i] = std::make_unique<FunctionalTable>(Family::DeltaEps, c.sets[i], c.args[i],
                                                            grid.tol);
    }
    return c;
}

BoundReport evaluate(const BoundSpec& spec, const ScanGrid& grid, const Context& c) {
    BoundReport rep;
    rep.id = spec.id;
    std::vector<double> per_set(c.sets.size(), 0.0);
    bool first = true, first_sweep = true;
    std::string problem;
    auto is_base = [&grid](const ParamSet& s) {
        for (const auto& b : grid.params)
            if (b.n == s.n && b.nu == s.nu && b.delta == s.delta && b.eps == s.eps) return true;
        return false;
    };
    for (std::size_t i = 0; i < c.sets.size(); ++i) {
        const FunctionalTable* t = spec.needs_functionals ? c.tables[i].get() : nullptr;
        const ScanResult s = scan(spec, c.sets[i], c.args[i], t);
        per_set[i] = s.max_ratio;
        if (first_sweep || s.max_ratio > rep.sweep_max_ratio) {
            rep.sweep_max_ratio = s.max_ratio;
            rep.sweep_witness_r = s.witness;
            rep.sweep_witness_params = c.sets[i];
            first_sweep = false;
        }
        if (!is_base(c.sets[i])) continue;
        rep.points += s.points;
        if (problem.empty() && !s.problem.empty()) problem = s.problem;
        if (first || s.max_ratio > rep.max_ratio) {
            rep.max_ratio = s.max_ratio;
            rep.witness_r = s.witness;
            rep.witness_params = c.sets[i];
            first = false;
        }
    }

    // Spread: within each group of sets sharing the non-uniform coordinates.
    rep.uniformity_spread = 1.0;
    if (spec.uniform_in != kUniformNone) {
        std::map<std::pair<double, double>, std::pair<double, double>> groups;
        for (const auto& base : grid.params) {
            for (std::size_t i = 0; i < c.sets.size(); ++i) {
                const ParamSet& s = c.sets[i];
                if (s.n != base.n || s.nu != base.nu) continue;
                const bool in_sweep =
                    std::find(grid.deltas.begin(), grid.deltas.end(), s.delta) != grid.deltas.end() &&
                    std::find(grid.epsilons.begin(), grid.epsilons.end(), s.eps) != grid.epsilons.end();
                if (!in_sweep) continue;
                const double kd = (spec.uniform_in & kUniformDelta) ? 0.0 : s.delta;
                const double ke = (spec.uniform_in & kUniformEps) ? 0.0 : s.eps;
                auto [it, fresh] = groups.try_emplace({kd, ke}, per_set[i], per_set[i]);
                if (!fresh) {
                    it->second.first = std::min(it->second.first, per_set[i]);
                    it->second.second = std::max(it->second.second, per_set[i]);
                }
            }
        }
        for (const auto& [key, mm] : groups) {
            double spread = 1.0;
            if (mm.second > 0.0) spread = mm.first > 0.0 ? mm.second / mm.first : kInf;
            rep.uniformity_spread = std::max(rep.uniformity_spread, spread);
        }
    }

    std::ostringstream msg;
    bool ok = std::isfinite(rep.max_ratio) && rep.points > 0;
    if (!ok) msg << (problem.empty() ? "no admissible points" : problem);
    if (ok && spec.exact_constant && rep.max_ratio > *spec.exact_constant + grid.exact_slack) {
        ok = false;
        msg << "ratio " << rep.max_ratio << " exceeds constant " << *spec.exact_constant;
    }
    rep.pass = ok;
    rep.uniform = rep.uniformity_spread <= grid.spread_threshold;
    rep.message = msg.str();
    return rep;
}

}  // namespace

std::string to_string(BoundDomain d) {
    switch (d) {
        case BoundDomain::Positive: return "r>0";
        case BoundDomain::AtLeastDelta: return "r>=delta";
        case BoundDomain::BelowDelta: return "0<r<delta";
        case BoundDomain::Negative: return "r<0";
        case BoundDomain::All: return "all r";
        case BoundDomain::NonNegativeKge: return "r>=0 and K(r)>=delta";
        case BoundDomain::Scalar: return "scalar";
    }
    return "?";
}

bool in_domain(BoundDomain d, double r, const ParamSet& p) {
    switch (d) {
        case BoundDomain::Positive: return r > 0.0;
        case BoundDomain::AtLeastDelta: return r >= p.delta;
        case BoundDomain::BelowDelta: return r > 0.0 && r < p.delta;
        case BoundDomain::Negative: return r < 0.0;
        case BoundDomain::All: return std::isfinite(r);
        case BoundDomain::NonNegativeKge: return r >= 0.0 && std::hypot(r, p.eps) >= p.delta;
        case BoundDomain::Scalar: return true;
    }
    return false;
}

const std::vector<BoundSpec>& bound_registry() {
    static const std::vector<BoundSpec> registry = build_registry();
    return registry;
}

const BoundSpec& bound_spec(int id) {
    for (const auto& s : bound_registry())
        if (s.id == id) return s;
    throw PreconditionError("no registered bound with id " + std::to_string(id));
}

std::vector<int> registry_ids() {
    std::vector<int> ids;
    for (const auto& s : bound_registry()) ids.push_back(s.id);
    return ids;
}

BoundValue evaluate_bound(const BoundSpec& spec, double r, const ParamSet& p) {
    if (!in_domain(spec.domain, r, p)) {
        std::ostringstream os;
        os << "bound " << spec.id << " is stated for " << to_string(spec.domain)
           << ", evaluated at r = " << r;
        throw ExpressionDomainError(os.str());
    }
    BoundPoint q;
    q.r = r;
    q.p = &p;
    return {spec.lhs(q), spec.rhs(q)};
}

ScanGrid default_scan_grid() {
    ScanGrid g;
    g.params = {validate_params(2.5, 3.25, 0.1, 0.01)};
    return g;
}

std::vector<double> scan_arguments(const ScanGrid& grid, const ParamSet& p) {
    if (!(grid.r_min > 0.0) || !(grid.r_max > grid.r_min) || grid.per_decade < 1)
        throw PreconditionError("scan grid needs 0 < r_min < r_max and per_decade >= 1");
    const double decades = std::log10(grid.r_max / grid.r_min);
    const long count = std::lround(decades * grid.per_decade);
    std::vector<double> out;
    out.reserve(2 * count + 10);
    for (long k = 0; k <= count; ++k) {
        const double r = grid.r_min * std::pow(10.0, static_cast<double>(k) / grid.per_decade);
        out.push_back(r);
        out.push_back(-r);
    }
    for (double s : {p.delta, p.eps, 1.0}) {
        out.push_back(s);
        out.push_back(-s);
    }
    out.push_back(0.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

BoundReport check_bound(const BoundSpec& spec, const ScanGrid& grid) {
    if (grid.params.empty()) throw PreconditionError("scan grid has no parameter sets");
    const Context c = make_context(grid, spec.needs_functionals);
    return evaluate(spec, grid, c);
}

std::vector<BoundReport> check_all(const std::vector<BoundSpec>& specs, const ScanGrid& grid) {
    if (grid.params.empty()) throw PreconditionError("check_all needs at least one parameter set");
    const bool tables = std::any_of(specs.begin(), specs.end(),
                                    [](const BoundSpec& s) { return s.needs_functionals; });
    const Context c = make_context(grid, tables);
    std::vector<BoundReport> out(specs.size());
    const int N = static_cast<int>(specs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < N; ++i) out[i] = evaluate(specs[i], grid, c);
    return out;
}

std::vector<BoundReport> check_all(const ScanGrid& grid) { return check_all(bound_registry(), grid); }

double product_bound_lhs(double r, const ParamSet& p) {
    return p.n * p.n * std::pow(r, p.nu) +
           std::pow(p.delta, 2.0 * p.l) * p.nu * p.nu * std::pow(r, p.n);
}

double product_bound_rhs(double r, const ParamSet& p) {
    const double q = p.nu * p.nu + p.nu * (2.0 - 4.0 * p.n) + p.n * (p.n + 2.0);
    return std::pow(p.delta, 2.0 * p.l) * (p.nu - 2.0) * p.nu * std::pow(r, p.n) -
           std::pow(p.delta, p.l) * q * std::pow(r, 0.5 * (p.n + p.nu)) +
           p.n * (p.n - 2.0) * std::pow(r, p.nu);
}

BoundReport check_eq56_pointwise(const ParamSet& p, const std::vector<double>& r) {
    BoundReport rep;
    rep.id = 56;
    rep.witness_params = p;
    bool positive = true;
    double bad_r = 0.0;
    for (double x : r) {
        if (!(x > 0.0)) {
            std::ostringstream os;
            os << "polynomial check is stated for r > 0, got r = " << x;
            throw ExpressionDomainError(os.str());
        }
        const double l = product_bound_lhs(x, p), h = product_bound_rhs(x, p);
        if (!(h > 0.0)) {
            if (positive) bad_r = x;
            positive = false;
            continue;
        }
        const double v = l / h;
        if (rep.points == 0 || v > rep.max_ratio) {
            rep.max_ratio = v;
            rep.witness_r = x;
        }
        ++rep.points;
    }
    rep.pass = positive && rep.points > 0 && std::isfinite(rep.max_ratio);
    if (!positive) {
        std::ostringstream os;
        os << "right side not positive at r = " << bad_r;
        rep.message = os.str();
        rep.max_ratio = kInf;
        rep.witness_r = bad_r;
    }
    return rep;
}

SecondDerivativeSplit check_second_derivative_split(const ParamSet& p, const FunctionalTolerance& tol) {
    const SecondDerivativeEnergy e = fde_second_derivative_energy(p, tol);
    SecondDerivativeSplit c;
    c.whole_line = e.whole_line;
    c.twice_half_line = 2.0 * e.half_line;
    c.rel_difference = std::abs(c.whole_line - c.twice_half_line) / std::abs(c.whole_line);
    c.pass = std::isfinite(c.whole_line) && c.rel_difference <= 1e-6;
    return c;
}

}  // namespace stfe
