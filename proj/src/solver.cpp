#include "stfe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stfe/errors.hpp"
#include "stfe/kernels.hpp"

// LAPACK banded LU with partial pivoting.
extern "C" void dgbsv_(const int* n, const int* kl, const int* ku, const int* nrhs, double* ab,
                       const int* ldab, int* ipiv, double* b, const int* ldb, int* info);

namespace stfe {

Scheme parse_scheme(const std::string& name) {
    if (name == "explicit") return Scheme::Explicit;
    if (name == "semi_implicit") return Scheme::SemiImplicit;
    throw ConfigError("unknown scheme '" + name + "'");
}

std::string to_string(Scheme s) { return s == Scheme::Explicit ? "explicit" : "semi_implicit"; }

void validate_config(const SimConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (c.m < 8 || (c.m & (c.m - 1)) != 0) fail("grid size m must be a power of two >= 8");
    if (c.dt < 0.0 || !std::isfinite(c.dt)) fail("dt must be >= 0 (0 selects the default)");
    if (!(c.T_end >= 0.0) || !std::isfinite(c.T_end)) fail("T_end must be >= 0");
    if (!(c.R > 0.0)) fail("cutoff R must be positive");
    for (double t : c.report_times)
        if (!(t >= 0.0 && t <= c.T_end)) fail("report times must lie in [0, T_end]");
    try {
        validate_noise_spec(c.noise);
    } catch (const NoiseSpecError& e) {
        fail(e.what());
    }
}

double cutoff_g(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double t = r - 1.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_factor(const GridState& s, double R) {
    if (!(R > 0.0)) throw PreconditionError("R must be positive");
    double sup = 0.0;
    for (double v : s.u) sup = std::max(sup, std::abs(v));
    return cutoff_g(sup / R);
}

std::vector<double> drift_with_faces(const GridState& s, std::span<const double> M) {
    std::vector<double> out(s.u.size());
    serial::flux_drift(s.u, M, s.h, out);
    return out;
}

std::vector<double> deterministic_drift(const GridState& s, const Mobility& F) {
    if (F.kind() == MobilityKind::F0) {
        for (double v : s.u)
            if (!(v > 0.0)) throw DomainError("F0 mobility requires positive values");
    }
    const std::size_t m = s.u.size();
    std::vector<double> f(m), df(m), M(m);
    serial::evaluate_mobility(F, s.u, f, df);
    serial::face_mobility(f, M);
    return drift_with_faces(s, M);
}

double default_dt(const SimConfig& cfg, const GridState& u0) {
    const double h = 1.0 / cfg.m;
    if (cfg.scheme == Scheme::SemiImplicit) return 0.5 * h * h;
    const Mobility F(cfg.mobility, cfg.params);
    double maxF2 = 0.0;
    for (double v : u0.u) {
        const double f = F(v).f;
        maxF2 = std::max(maxF2, f * f);
    }
    return 0.1 * h * h * h * h / std::max(maxF2, 1e-300);
}

// The periodic pentadiagonal system becomes banded with half-width 4 after the
// interleaved ordering 0, m-1, 1, m-2, 2, ...
struct Stepper::Impl {
    static constexpr int kBand = 4;
    static constexpr int kLdab = 3 * kBand + 1;
    std::vector<double> f, df, M, drift, corr, noise, rhs;
    std::vector<int> pos;  // grid index -> position in the interleaved ordering
    std::vector<double> ab;
    std::vector<int> ipiv;

    void add(int row, int col, double v) {
        const int r = pos[row], c = pos[col];
        ab[static_cast<std::size_t>(c) * kLdab + (2 * kBand + r - c)] += v;
    }
};

Stepper::Stepper(const SimConfig& cfg, const NoiseField& field)
    : cfg_(cfg), field_(&field), F_(cfg.mobility, cfg.params), impl_(std::make_unique<Impl>()) {
    if (field.m() != cfg.m) throw GridMismatch("noise field grid differs from config grid");
    const std::size_t m = cfg.m;
    for (auto* v : {&impl_->f, &impl_->df, &impl_->M, &impl_->drift, &impl_->corr, &impl_->noise,
                    &impl_->rhs})
        v->assign(m, 0.0);
    const int mm = cfg.m;
    impl_->pos.resize(mm);
    for (int j = 0; j < mm; ++j) impl_->pos[j] = 2 * j < mm ? 2 * j : 2 * (mm - 1 - j) + 1;
    impl_->ab.assign(static_cast<std::size_t>(Impl::kLdab) * mm, 0.0);
    impl_->ipiv.assign(mm, 0);
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

const std::vector<double>& Stepper::last_faces() const { return impl_->M; }

GridState Stepper::step(const GridState& s, double dt, std::span<const double> dbeta) {
    if (s.m() != cfg_.m) throw GridMismatch("state grid differs from config grid");
    Impl& w = *impl_;
    const int m = cfg_.m;
    const double h = s.h;
    const bool par = cfg_.parallel_kernels;

    if (F_.kind() == MobilityKind::F0 || F_.kind() == MobilityKind::Fdelta) {
        for (double v : s.u)
            if (v < 0.0) throw DomainError("state left the domain of the mobility (u < 0)");
    }
    if (par) {
        omp::evaluate_mobility(F_, s.u, w.f, w.df);
        omp::face_mobility(w.f, w.M);
    } else {
        serial::evaluate_mobility(F_, s.u, w.f, w.df);
        serial::face_mobility(w.f, w.M);
    }
    const double gamma = cutoff_factor(s, cfg_.R);
    const bool noisy = !field_->is_zero() && gamma > 0.0;
    if (noisy) {
        if (par) {
            omp::stratonovich_correction(w.f, w.df, *field_, h, w.corr);
            omp::noise_divergence(w.f, *field_, dbeta, h, w.noise);
        } else {
            serial::stratonovich_correction(w.f, w.df, *field_, h, w.corr);
            serial::noise_divergence(w.f, *field_, dbeta, h, w.noise);
        }
    } else {
        std::fill(w.corr.begin(), w.corr.end(), 0.0);
        std::fill(w.noise.begin(), w.noise.end(), 0.0);
    }

    GridState out;
    out.h = h;
    out.t = s.t + dt;
    out.u.resize(m);
    const double g2 = gamma * gamma;
    if (cfg_.scheme == Scheme::Explicit) {
        if (par) omp::flux_drift(s.u, w.M, h, w.drift);
        else serial::flux_drift(s.u, w.M, h, w.drift);
        for (int j = 0; j < m; ++j)
            out.u[j] = s.u[j] + dt * (w.drift[j] + g2 * w.corr[j]) + gamma * w.noise[j];
    } else {
        // (I + dt A) x = rhs with A the frozen-mobility flux operator.
        const double c = dt / (h * h * h * h);
        std::fill(w.ab.begin(), w.ab.end(), 0.0);
        auto idx = [m](int j) { return ((j % m) + m) % m; };
        for (int j = 0; j < m; ++j) {
            const double Mp = w.M[j], Mm = w.M[idx(j - 1)];
            w.add(j, idx(j - 2), c * Mm);
            w.add(j, idx(j - 1), c * (-Mp - 3.0 * Mm));
            w.add(j, j, 1.0 + c * (3.0 * Mp + 3.0 * Mm));
            w.add(j, idx(j + 1), c * (-3.0 * Mp - Mm));
            w.add(j, idx(j + 2), c * Mp);
        }
        double mean_b = 0.0;
        for (int j = 0; j < m; ++j) {
            const double b = s.u[j] + dt * g2 * w.corr[j] + gamma * w.noise[j];
            w.rhs[w.pos[j]] = b;
            mean_b += b;
        }
        const int kb = Impl::kBand, ldab = Impl::kLdab, nrhs = 1;
        int info = 0;
        dgbsv_(&m, &kb, &kb, &nrhs, w.ab.data(), &ldab, w.ipiv.data(), w.rhs.data(), &m, &info);
        if (info != 0) {
            std::ostringstream os;
            os << "banded LU failed (info = " << info << ")";
            throw LinearSolveFailure(os.str());
        }
        // The exact solution has the mean of b (columns of A sum to zero); remove
        // the round-off drift of the factorization.
        double mean_x = 0.0;
        for (int j = 0; j < m; ++j) mean_x += w.rhs[w.pos[j]];
        const double shift = (mean_b - mean_x) / m;
        for (int j = 0; j < m; ++j) out.u[j] = w.rhs[w.pos[j]] + shift;
    }
    for (double v : out.u)
        if (!std::isfinite(v)) throw BlowupDetected("non-finite value in step", -1);
    return out;
}

GridState step(const GridState& s, const SimConfig& cfg, const NoiseField& field, double dt,
               std::mt19937_64& rng) {
    Stepper st(cfg, field);
    const auto db = sample_increments(field, dt, rng);
    return st.step(s, dt, db);
}

GridState initial_state(const SimConfig& cfg) {
    GridState s = init_state(cfg.profile, cfg.m);
    if (cfg.lift_initial)
        for (double& v : s.u) v += cfg.params.delta;
    return s;
}

namespace {

// Snaps requested report times to step indices; always includes 0 and the last step.
std::vector<long> report_steps_for(const SimConfig& cfg, double dt, long steps) {
    std::vector<long> out{0, steps};
    if (cfg.report_times.empty()) {
        const long n = static_cast<long>(std::floor(cfg.T_end * 100.0 + 1e-9));
        for (long i = 1; i <= n; ++i) out.push_back(std::lround(i * 0.01 / dt));
    } else {
        for (double t : cfg.report_times) out.push_back(std::lround(t / dt));
    }
    for (long& v : out) v = std::clamp(v, 0L, steps);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double sum_M_sq(const std::vector<double>& M, const std::vector<double>& v, double h) {
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) acc += M[j] * v[j] * v[j];
    return h * acc;
}

double sum_sq(const std::vector<double>& v, double h) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return h * acc;
}

Trajectory run(const SimConfig& cfg, const NoiseField& field, double dt, long steps,
               const std::vector<std::vector<double>>* given) {
    Trajectory tr;
    tr.config = cfg;
    tr.dt = dt;
    tr.steps = steps;
    tr.report_steps = report_steps_for(cfg, dt, steps);
    GridState s = initial_state(cfg);
    const double mass0 = grid_mass(s);
    tr.min_u = *std::min_element(s.u.begin(), s.u.end());
    tr.max_u = *std::max_element(s.u.begin(), s.u.end());
    Stepper stepper(cfg, field);
    std::size_t next_report = 0;
    auto record = [&](long i) {
        if (next_report < tr.report_steps.size() && tr.report_steps[next_report] == i) {
            if (cfg.keep_states) tr.states.push_back(s);
            ++next_report;
        }
    };
    record(0);
    if (cfg.keep_increments && !given) tr.increments.reserve(steps);
    for (long i = 0; i < steps; ++i) {
        std::vector<double> db;
        if (given) {
            db = (*given)[i];
        } else {
            auto rng = make_rng(cfg.seed, cfg.path, static_cast<std::uint64_t>(i));
            db = sample_increments(field, dt, rng);
        }
        GridState next;
        try {
            next = stepper.step(s, dt, db);
        } catch (const BlowupDetected& e) {
            std::ostringstream os;
            os << e.what() << " at step " << i << " (t = " << s.t << ")";
            throw BlowupDetected(os.str(), i);
        } catch (const DomainError& e) {
            std::ostringstream os;
            os << e.what() << " at step " << i << " (t = " << s.t << ")";
            throw BlowupDetected(os.str(), i);
        }
        if (cutoff_factor(s, cfg.R) < 1.0) ++tr.cutoff_active_steps;
        const auto lap = discrete_laplacian(s.u, s.h);
        tr.int_F2_d3u += dt * sum_M_sq(stepper.last_faces(), third_difference(s.u, s.h), s.h);
        tr.int_d2u += dt * sum_sq(lap, s.h);
        if (cfg.keep_increments) tr.increments.push_back(std::move(db));
        s = std::move(next);
        s.t = (i + 1) * dt;
        for (double v : s.u) {
            tr.min_u = std::min(tr.min_u, v);
            tr.max_u = std::max(tr.max_u, v);
        }
        tr.max_mass_drift = std::max(tr.max_mass_drift, std::abs(grid_mass(s) - mass0));
        record(i + 1);
    }
    return tr;
}

}  // namespace

Trajectory simulate_path(const SimConfig& cfg) {
    validate_config(cfg);
    const NoiseField field(cfg.noise, cfg.m);
    return simulate_path(cfg, field);
}

Schedule schedule_for(const SimConfig& cfg) {
    validate_config(cfg);
    Schedule sc;
    sc.dt = cfg.dt > 0.0 ? cfg.dt : default_dt(cfg, initial_state(cfg));
    if (cfg.T_end > 0.0) {
        sc.steps = static_cast<long>(std::ceil(cfg.T_end / sc.dt - 1e-9));
        sc.dt = cfg.T_end / sc.steps;
    }
    sc.report_steps = report_steps_for(cfg, sc.dt, sc.steps);
    return sc;
}

Trajectory simulate_path(const SimConfig& cfg, const NoiseField& field) {
    const Schedule sc = schedule_for(cfg);
    return run(cfg, field, sc.dt, sc.steps, nullptr);
}

Trajectory replay_path(const SimConfig& cfg, const NoiseField& field, double dt,
                       const std::vector<std::vector<double>>& increments) {
    validate_config(cfg);
    if (!(dt > 0.0)) throw PreconditionError("replay needs dt > 0");
    return run(cfg, field, dt, static_cast<long>(increments.size()), &increments);
}

}  // namespace stfe
