#include <catch_amalgamated.hpp>

#include <cmath>

#include "stfe/errors.hpp"
#include "stfe/functionals.hpp"
#include "stfe/ito_ledger.hpp"
#include "stfe/solver.hpp"

using namespace stfe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig base(int m = 32) {
    SimConfig c;
    c.params = validate_params(2.5, 3.25, 0.1, 0.01);
    c.m = m;
    c.T_end = 0.002;
    c.profile = {"perturbed_constant", 1.0, 0.2, 1};
    return c;
}

GridState constant(int m, double v) { return init_state({"constant", v}, m); }

}  // namespace

TEST_CASE("zero noise leaves only dissipation") {
    SimConfig c = base();
    c.noise = zero_noise(4);
    const NoiseField f(c.noise, c.m);
    const Trajectory tr = simulate_path(c, f);
    const ItoLedger L = ito_ledger(tr, f);
    REQUIRE(L.t.size() == tr.report_steps.size());
    for (std::size_t i = 0; i < L.t.size(); ++i) {
        CHECK(L.production[i] == 0.0);
        CHECK(L.cubic[i] == 0.0);
        CHECK(L.quadratic_a[i] == 0.0);
        CHECK(L.quadratic_b[i] == 0.0);
        CHECK(L.zeroth[i] == 0.0);
        CHECK(L.stochastic[i] == 0.0);
        CHECK(L.ito_correction[i] == 0.0);
        CHECK(L.dissipation[i] <= 0.0);
    }
    CHECK(L.lhs.back() < 0.0);
}

TEST_CASE("deterministic residual is first order in dt") {
    SimConfig c = base(16);
    c.noise = zero_noise();
    const NoiseField f(c.noise, c.m);
    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
        c.dt = 2e-5 / (1 << k);
        const Trajectory tr = simulate_path(c, f);
        const ItoLedger L = ito_ledger(tr, f);
        const double r = std::abs(L.residual.back());
        if (k > 0) CHECK(prev / r > 1.7);
        prev = r;
    }
}

TEST_CASE("single mode rates on a constant state") {
    const int m = 64;
    const double lam = 0.3;
    const ParamSet p = validate_params(2.5, 3.25, 0.1, 0.01);
    const NoiseField f(explicit_noise({{-1, lam}, {1, lam}}), m);
    const Mobility unit(MobilityKind::Unit, p);
    const ItoRates r = ito_rates(constant(m, 1.0), unit, f, 10.0);
    const double k4 = std::pow(2.0 * M_PI, 4);
    CHECK(r.dissipation == 0.0);
    CHECK(r.production == 0.0);
    CHECK(r.cubic == 0.0);
    CHECK(r.quadratic_a == 0.0);
    CHECK(r.quadratic_b == 0.0);
    CHECK(r.ito_correction == 0.0);
    // (1/8) sum_k 4 sigma_k sigma_k'''' averages to (2 pi)^4 lambda^2 / 2 per mode.
    CHECK_THAT(r.zeroth, WithinRel(k4 * lam * lam, 1e-12));
    // Discrete quadratic variation tends to the same value.
    CHECK_THAT(r.quadratic_variation, WithinRel(k4 * lam * lam, 0.01));

    const Mobility Fm(MobilityKind::Fde, p);
    const double F2 = std::pow(Fm(2.0).f, 2);
    CHECK_THAT(ito_rates(constant(m, 2.0), Fm, f, 10.0).zeroth, WithinRel(k4 * lam * lam * F2, 1e-12));
    // The cutoff switches the noise terms off.
    CHECK(ito_rates(constant(m, 2.0), Fm, f, 0.5).zeroth == 0.0);
}

TEST_CASE("integration by parts defect shrinks with h") {
    const ParamSet p = validate_params(2.5, 3.25, 0.1, 0.01);
    const Mobility F(MobilityKind::Fde, p);
    double prev = 0.0;
    for (int m : {32, 64, 128}) {
        const NoiseField f(decay_noise(4, 3.0, 0.5), m);
        const ItoRates r = ito_rates(init_state({"perturbed_constant", 1.0, 0.3, 1}, m), F, f, 10.0);
        const double defect = std::abs(r.ito_correction + r.quadratic_variation - r.noise_terms());
        const double scale = std::abs(r.noise_terms());
        REQUIRE(scale > 0.0);
        if (m > 32) CHECK(defect < 0.5 * prev);
        prev = defect;
        CHECK(defect / scale < 0.2);
    }
}

TEST_CASE("stochastic increment matches the energy pairing") {
    const ParamSet p = validate_params(2.5, 3.25, 0.1, 0.01);
    const Mobility F(MobilityKind::Fde, p);
    const int m = 32;
    const NoiseField f(decay_noise(3, 3.0, 0.5), m);
    const GridState s = init_state({"perturbed_constant", 1.0, 0.3, 2}, m);
    std::vector<double> db(f.modes(), 0.0);
    CHECK(stochastic_increment(s, F, f, 10.0, db) == 0.0);
    db[f.row_of(1)] = 0.01;
    const double a = stochastic_increment(s, F, f, 10.0, db);
    for (double& v : db) v *= -2.0;
    CHECK_THAT(stochastic_increment(s, F, f, 10.0, db), WithinRel(-2.0 * a, 1e-13));
    CHECK_THROWS_AS(stochastic_increment(s, F, f, 10.0, std::vector<double>(2, 0.0)), GridMismatch);
}

TEST_CASE("ledger needs the increments") {
    SimConfig c = base();
    c.keep_increments = false;
    const NoiseField f(c.noise, c.m);
    const Trajectory tr = simulate_path(c, f);
    REQUIRE(tr.steps > 0);
    CHECK_THROWS_AS(ito_ledger(tr, f), MissingIncrements);
}

TEST_CASE("noisy ledger replays the stored path") {
    SimConfig c = base();
    c.seed = 5;
    const NoiseField f(c.noise, c.m);
    const Trajectory tr = simulate_path(c, f);
    const ItoLedger L = ito_ledger(tr, f);
    REQUIRE(L.lhs.size() == tr.states.size());
    for (std::size_t i = 0; i < L.lhs.size(); ++i)
        CHECK_THAT(L.lhs[i], WithinAbs(energy(tr.states[i]) - energy(tr.states[0]), 1e-12));
    CHECK(L.t.front() == 0.0);
    CHECK(L.residual.front() == 0.0);
}
