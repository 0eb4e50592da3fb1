#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stfe/errors.hpp"
#include "stfe/functionals.hpp"
#include "stfe/grid.hpp"
#include "stfe/kernels.hpp"
#include "stfe/solver.hpp"

using namespace stfe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig base_config(int m = 32) {
    SimConfig c;
    c.params = validate_params(2.5, 3.25, 0.1, 0.01);
    c.m = m;
    c.T_end = 0.005;
    c.seed = 21;
    return c;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double abs_sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

}  // namespace

TEST_CASE("initial profiles") {
    InitialProfile c{"constant", 1.0};
    const GridState a = init_state(c, 64);
    for (double v : a.u) CHECK(v == 1.0);
    CHECK(grid_mass(a) == 1.0);

    InitialProfile p{"perturbed_constant", 1.0, 0.1, 1};
    const GridState b = init_state(p, 64);
    for (int j = 0; j < 64; ++j) CHECK_THAT(b.u[j], WithinAbs(1.0 + 0.1 * std::sin(2 * M_PI * j / 64.0), 1e-15));
    CHECK_THAT(grid_mass(b), WithinAbs(1.0, 1e-14));

    CHECK_THROWS_AS(init_state({"perturbed_constant", 1.0, 1.5, 1}, 64), ProfileError);
    CHECK_THROWS_AS(init_state({"triangle"}, 64), ProfileError);
    InitialProfile bump{"bump", 0.5, 1.0, 1, 0.9, 0.1};
    const GridState d = init_state(bump, 64);
    // Periodic distance: x = 0 is 0.1 from the centre.
    CHECK_THAT(d.u[0], WithinRel(0.5 + std::exp(-1.0), 1e-14));
}

TEST_CASE("cutoff") {
    CHECK(cutoff_g(0.5) == 1.0);
    CHECK(cutoff_g(3.0) == 0.0);
    CHECK_THAT(cutoff_g(1.5), WithinAbs(0.5, 1e-15));  // 1 - (6/32 - 15/16 + 10/8)
    CHECK_THAT(cutoff_g(1.25), WithinAbs(1.0 - (6 * std::pow(0.25, 5) - 15 * std::pow(0.25, 4) + 10 * std::pow(0.25, 3)), 1e-15));
    GridState s{{1.0, -5.0, 2.0}, 1.0 / 3, 0.0};
    CHECK(cutoff_factor(s, 10.0) == 1.0);
    CHECK(cutoff_factor(s, 5.0 / 3.0) == 0.0);
    CHECK_THAT(cutoff_factor(s, 5.0 / 1.5), WithinAbs(0.5, 1e-12));
}

TEST_CASE("deterministic drift") {
    const ParamSet p = validate_params(2.5, 3.25, 0.1, 0.01);
    const Mobility F(MobilityKind::Fde, p);
    const int m = 64;
    const double h = 1.0 / m;

    GridState c{std::vector<double>(m, 1.7), h, 0.0};
    for (double v : deterministic_drift(c, F)) CHECK(v == 0.0);

    // Frozen unit mobility: the stencil is the discrete biharmonic with symbol (4 sin^2(pi h)/h^2)^2.
    const GridState s = init_state({"perturbed_constant", 1.0, 0.2, 1}, m);
    const std::vector<double> ones(m, 1.0);
    const auto d = drift_with_faces(s, ones);
    const double sym = std::pow(4.0 * std::pow(std::sin(M_PI * h), 2) / (h * h), 2);
    for (int j = 0; j < m; ++j) CHECK_THAT(d[j], WithinAbs(-sym * (s.u[j] - 1.0), 1e-6));  // h^-4 roundoff
    CHECK_THAT(sym, WithinRel(std::pow(2 * M_PI, 4), 0.01));

    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> U(0.2, 2.0);
    GridState r{std::vector<double>(m), h, 0.0};
    for (double& v : r.u) v = U(g);
    const auto dr = deterministic_drift(r, F);
    CHECK(std::abs(sum(dr)) <= 1e-13 * abs_sum(dr));

    GridState neg = r;
    neg.u[3] = -0.1;
    CHECK_THROWS_AS(deterministic_drift(neg, Mobility(MobilityKind::F0, p)), DomainError);
    CHECK_NOTHROW(deterministic_drift(neg, F));
}

TEST_CASE("serial and omp kernels agree bit for bit") {
    const ParamSet p = validate_params(2.5, 3.25, 0.1, 0.01);
    const Mobility F(MobilityKind::Fde, p);
    const int m = 256;
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> U(-0.5, 2.0);
    std::vector<double> u(m), f1(m), f2(m), d1(m), d2(m), M1(m), M2(m), o1(m), o2(m);
    for (double& v : u) v = U(g);
    serial::evaluate_mobility(F, u, f1, d1);
    omp::evaluate_mobility(F, u, f2, d2);
    CHECK(f1 == f2);
    CHECK(d1 == d2);
    serial::face_mobility(f1, M1);
    omp::face_mobility(f1, M2);
    CHECK(M1 == M2);
    serial::flux_drift(u, M1, 1.0 / m, o1);
    omp::flux_drift(u, M1, 1.0 / m, o2);
    CHECK(o1 == o2);
    serial::centered_difference(u, 1.0 / m, o1);
    omp::centered_difference(u, 1.0 / m, o2);
    CHECK(o1 == o2);
}

TEST_CASE("config validation") {
    SimConfig c = base_config();
    c.m = 48;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = base_config();
    c.R = 0.0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = base_config();
    c.report_times = {0.5};
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    CHECK_THROWS_AS(parse_scheme("implicit"), ConfigError);
}

TEST_CASE("schedule snaps dt to T_end") {
    SimConfig c = base_config();
    c.dt = 3e-4;
    c.T_end = 0.01;
    const Schedule s = schedule_for(c);
    CHECK(s.steps == 34);
    CHECK_THAT(s.dt * s.steps, WithinRel(0.01, 1e-15));
    CHECK(s.report_steps.front() == 0);
    CHECK(s.report_steps.back() == 34);
    c.dt = 0.0;
    CHECK_THAT(schedule_for(c).dt, WithinRel(0.5 / (32.0 * 32.0), 0.1));
}

TEST_CASE("fixed point, mass and noise-free energy") {
    SimConfig c = base_config();
    c.noise = zero_noise();
    c.profile = {"constant", 1.2};
    const NoiseField zf(c.noise, c.m);
    Stepper st(c, zf);
    const GridState s0 = initial_state(c);
    const GridState s1 = st.step(s0, 1e-3, std::vector<double>(zf.modes(), 0.0));
    // Exact up to the conditioning of the implicit solve (dt h^-4 ~ 1e4).
    for (double v : s1.u) CHECK_THAT(v, WithinAbs(1.2, 1e-11));

    // Semi-implicit with a step far above the explicit limit still decays the energy.
    SimConfig d = base_config();
    d.noise = zero_noise();
    const NoiseField df(d.noise, d.m);
    Stepper sd(d, df);
    GridState s = initial_state(d);
    double e = energy(s);
    const double big = 1e4 * default_dt([&] { SimConfig x = d; x.scheme = Scheme::Explicit; return x; }(), s);
    for (int i = 0; i < 50; ++i) {
        s = sd.step(s, big, std::vector<double>(df.modes(), 0.0));
        const double en = energy(s);
        CHECK(en <= e + 1e-12);
        e = en;
    }

    // Mass is preserved per step with noise on.
    SimConfig n = base_config();
    const NoiseField nf(n.noise, n.m);
    Stepper sn(n, nf);
    GridState a = initial_state(n);
    const double m0 = grid_mass(a);
    for (int i = 0; i < 100; ++i) {
        auto rng = make_rng(1, 0, i);
        const auto db = sample_increments(nf, 1e-4, rng);
        const GridState b = sn.step(a, 1e-4, db);
        CHECK(std::abs(sum(b.u) - sum(a.u)) <= 1e-13 * n.m);
        a = b;
    }
    CHECK(std::abs(grid_mass(a) - m0) <= 1e-12);
}

TEST_CASE("simulate_path: trivial horizon, replay and determinism") {
    SimConfig c = base_config();
    c.T_end = 0.0;
    const Trajectory t0 = simulate_path(c);
    CHECK(t0.steps == 0);
    REQUIRE(t0.states.size() == 1);
    CHECK(t0.states[0].u == initial_state(c).u);

    c = base_config();
    const Trajectory a = simulate_path(c);
    const Trajectory b = simulate_path(c);
    CHECK(a.states.back().u == b.states.back().u);
    CHECK(static_cast<long>(a.increments.size()) == a.steps);

    const NoiseField f(c.noise, c.m);
    const Trajectory r = replay_path(c, f, a.dt, a.increments);
    CHECK(r.states.back().u == a.states.back().u);

    SimConfig par = c;
    par.parallel_kernels = true;
    CHECK(simulate_path(par).states.back().u == a.states.back().u);

    SimConfig other = c;
    other.seed = 22;
    CHECK(simulate_path(other).states.back().u != a.states.back().u);

    SimConfig p1 = c;
    p1.path = 1;
    CHECK(simulate_path(p1).states.back().u != a.states.back().u);
}

TEST_CASE("cutoff inertness") {
    SimConfig c = base_config();
    const Trajectory a = simulate_path(c);
    REQUIRE(a.max_u < c.R);
    SimConfig big = c;
    big.R = 10 * c.R;
    const Trajectory b = simulate_path(big);
    CHECK(a.states.back().u == b.states.back().u);
    CHECK(a.cutoff_active_steps == 0);

    // A cutoff below the data switches the noise off; the deterministic flow remains.
    SimConfig tiny = c;
    tiny.R = 0.1;
    const Trajectory z = simulate_path(tiny);
    CHECK(z.cutoff_active_steps == z.steps);
    SimConfig quiet = c;
    quiet.noise = zero_noise();
    CHECK(z.states.back().u == simulate_path(quiet).states.back().u);
}

TEST_CASE("semi-implicit and explicit agree to O(dt)") {
    SimConfig c = base_config(16);
    c.T_end = 0.002;
    c.noise = decay_noise(4, 3.0, 0.5);
    const NoiseField f(c.noise, c.m);
    auto diff_at = [&](long steps) {
        const double dt = c.T_end / steps;
        std::vector<std::vector<double>> inc(steps);
        for (long i = 0; i < steps; ++i) {
            auto rng = make_rng(3, 0, i);
            inc[i] = sample_increments(f, dt, rng);
        }
        SimConfig e = c, s = c;
        e.scheme = Scheme::Explicit;
        s.scheme = Scheme::SemiImplicit;
        const auto ue = replay_path(e, f, dt, inc).states.back().u;
        const auto us = replay_path(s, f, dt, inc).states.back().u;
        double d = 0;
        for (int j = 0; j < c.m; ++j) d = std::max(d, std::abs(ue[j] - us[j]));
        return d;
    };
    // The explicit limit at m = 16 is about 1e-6.
    const double d1 = diff_at(4000), d2 = diff_at(8000);
    CHECK(d1 < 1e-2);
    CHECK(d2 < 0.6 * d1);
}

TEST_CASE("blow-up is reported with its step") {
    SimConfig c = base_config();
    c.scheme = Scheme::Explicit;
    c.dt = 1e-3;  // far above the explicit stability limit
    c.T_end = 0.2;
    try {
        simulate_path(c);
        FAIL("no blow-up detected");
    } catch (const BlowupDetected& e) {
        CHECK(e.step >= 0);
        CHECK(e.step < 200);
    }
}

TEST_CASE("positivity on the reference run") {
    SimConfig c = base_config(64);
    c.T_end = 0.05;
    c.profile = {"perturbed_constant", 1.0, 0.3, 1};
    for (std::uint64_t path = 0; path < 3; ++path) {
        c.path = path;
        c.keep_increments = false;
        const Trajectory t = simulate_path(c);
        CHECK(t.min_u > 0.0);
    }
}
