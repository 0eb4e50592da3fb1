#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <omp.h>

#include "stfe/ensemble.hpp"
#include "stfe/errors.hpp"
#include "stfe/functionals.hpp"

using namespace stfe;
using Catch::Matchers::WithinRel;

namespace {

EnsembleConfig small(int n_paths = 8) {
    EnsembleConfig e;
    e.sim.params = validate_params(2.5, 3.25, 0.1, 0.01);
    e.sim.noise = decay_noise(4, 3.0, 0.5);
    e.sim.m = 32;
    e.sim.T_end = 0.01;
    e.sim.seed = 3;
    e.n_paths = n_paths;
    e.moment_powers = {2.0, 4.0};
    return e;
}

const MomentRow& row(const MomentReport& r, const std::string& q, double p) {
    for (const auto& x : r.rows)
        if (x.quantity == q && x.power == p) return x;
    throw std::runtime_error("missing row " + q);
}

std::filesystem::path scratch(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("stfe_test_" + name);
    std::filesystem::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("one deterministic path reproduces the functionals") {
    EnsembleConfig e = small(1);
    e.sim.noise = zero_noise();
    const MomentReport r = run_ensemble(e);
    REQUIRE(r.completed == 1);
    const Trajectory tr = simulate_path(e.sim);
    double sup_e = 0.0, sup_le = 0.0, sup_up = 0.0;
    for (const auto& s : tr.states) {
        sup_e = std::max(sup_e, energy(s));
        sup_le = std::max(sup_le, log_entropy(s, e.sim.params, LogEntropyVariant::Exact));
        double up = 0.0;
        for (double v : s.u) up += s.h * std::pow(v, 2.0 - e.sim.params.n);
        sup_up = std::max(sup_up, up);
    }
    CHECK_THAT(row(r, kSupEnergy, 2.0).estimate, WithinRel(sup_e, 1e-12));
    CHECK_THAT(row(r, kSupEnergy, 4.0).estimate, WithinRel(sup_e * sup_e, 1e-12));
    CHECK_THAT(row(r, kSupLogEntropy, 2.0).estimate, WithinRel(sup_le, 1e-12));
    CHECK_THAT(row(r, kIntF2D3u, 2.0).estimate, WithinRel(tr.int_F2_d3u, 1e-12));
    CHECK_THAT(row(r, kSupUPow, 1.0).estimate, WithinRel(sup_up, 1e-12));
    CHECK_THAT(row(r, kIntD2u, 1.0).estimate, WithinRel(tr.int_d2u, 1e-12));
    CHECK(row(r, kSupEnergy, 2.0).std_error == 0.0);
    CHECK(r.paths[0].t.size() == tr.states.size());
}

TEST_CASE("moment rows from records") {
    std::vector<PathRecord> recs(3);
    for (int i = 0; i < 3; ++i) {
        recs[i].completed = true;
        recs[i].energy = {1.0 + i, 0.5};
        recs[i].log_entropy = {0.0, 0.0};
        recs[i].u_pow_l1 = {1.0, 1.0};
        recs[i].int_F2_d3u = 4.0;
        recs[i].int_d2u = 2.0;
    }
    recs.push_back(PathRecord{});  // failed path: skipped
    const auto rows = moment_rows(recs, {2.0}, 2.0);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].quantity == kSupEnergy);
    CHECK(rows[0].n == 3);
    CHECK_THAT(rows[0].estimate, WithinRel(2.0, 1e-15));
    CHECK_THAT(rows[0].std_error, WithinRel(std::sqrt(1.0 / 3.0), 1e-14));
    CHECK(rows[2].estimate == 4.0);
    CHECK(rows[4].estimate == 4.0);
    CHECK(rows[4].std_error == 0.0);
}

TEST_CASE("standard error scales like one over root N") {
    // The sup of the energy sits at t = 0 on every path, so use the dissipation integral.
    EnsembleConfig e = small(32);
    const double a = row(run_ensemble(e), kIntF2D3u, 2.0).std_error;
    e.n_paths = 128;
    const double b = row(run_ensemble(e), kIntF2D3u, 2.0).std_error;
    CHECK(a / b > 2.0 / 1.3);
    CHECK(a / b < 2.0 * 1.3);
}

TEST_CASE("reports do not depend on thread count") {
    const EnsembleConfig e = small(6);
    omp_set_num_threads(1);
    const MomentReport a = run_ensemble(e);
    omp_set_num_threads(3);
    const MomentReport b = run_ensemble(e);
    omp_set_num_threads(1);
    CHECK(a == b);
    CHECK(to_json_string(a) == to_json_string(b));
    CHECK(to_csv_string(a) == to_csv_string(b));
    CHECK(a.completed + a.blowups == a.n_paths);
}

TEST_CASE("json round trip and csv shape") {
    const MomentReport r = run_ensemble(small(4));
    const MomentReport back = moment_report_from_json(to_json_string(r));
    CHECK(back == r);
    CHECK(to_json_string(back) == to_json_string(r));
    CHECK_THROWS_AS(moment_report_from_json("[1, 2]"), ConfigError);

    const std::string csv = to_csv_string(r);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    std::size_t expect = 1 + r.rows.size();
    for (const auto& p : r.paths) expect += p.t.size();
    CHECK(static_cast<std::size_t>(lines) == expect);
    CHECK(r.paths[0].t.size() == schedule_for(small().sim).report_steps.size());
}

TEST_CASE("failed paths are counted and serialized") {
    EnsembleConfig e = small(3);
    e.sim.scheme = Scheme::Explicit;
    e.sim.dt = 1e-4;  // far above the explicit limit at m = 32
    const MomentReport r = run_ensemble(e);
    CHECK(r.blowups == 3);
    CHECK(r.completed == 0);
    CHECK(std::isnan(r.min_u));
    for (const auto& p : r.paths) {
        CHECK_FALSE(p.completed);
        CHECK(p.blowup_step >= 0);
    }
    CHECK(moment_report_from_json(to_json_string(r)).blowups == 3);
}

TEST_CASE("emit refuses to overwrite") {
    const auto dir = scratch("emit");
    const MomentReport r = run_ensemble(small(2));
    const std::string path = emit_report(r, dir.string(), ReportFormat::Json, false);
    CHECK(std::filesystem::exists(path));
    CHECK_THROWS_AS(emit_report(r, dir.string(), ReportFormat::Json, false), IoError);
    CHECK_NOTHROW(emit_report(r, dir.string(), ReportFormat::Json, true));
    const std::string csv = emit_report(r, dir.string(), ReportFormat::Csv, false);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("kind,path,t,", 0) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("validation") {
    EnsembleConfig e = small();
    e.n_paths = 0;
    CHECK_THROWS_AS(validate_ensemble(e), ConfigError);
    e = small();
    e.moment_powers = {};
    CHECK_THROWS_AS(validate_ensemble(e), ConfigError);
    e = small();
    e.q = 0.0;
    CHECK_THROWS_AS(validate_ensemble(e), ConfigError);
    CHECK_THROWS_AS(uniformity_study(small(), {0.1, 0.05}), PreconditionError);
    CHECK_THROWS_AS(uniformity_study(small(), {0.1, 0.2, 0.05}), PreconditionError);
}

TEST_CASE("control column trips the detector") {
    EnsembleConfig e = small(4);
    e.sim.T_end = 0.002;
    const UniformityStudy st = uniformity_study(e, {0.16, 0.04, 0.01}, 3.0, true);
    REQUIRE(st.reports.size() == 3);
    const auto it = std::find_if(st.verdicts.begin(), st.verdicts.end(),
                                 [](const UniformityVerdict& v) { return v.quantity == "control_inv_delta"; });
    REQUIRE(it != st.verdicts.end());
    CHECK_THAT(it->max_growth, WithinRel(4.0, 1e-12));
    CHECK_FALSE(it->pass);
    CHECK_FALSE(st.pass);
    for (const auto& v : st.verdicts)
        if (v.quantity != "control_inv_delta") CHECK(v.pass);
    CHECK(st.reports[1].delta == 0.04);
}

TEST_CASE("single tuple sweep equals a lifted ensemble") {
    EnsembleConfig e = small(3);
    const SweepReport sw = regularization_sweep(e, {e.sim.params.delta}, {e.sim.params.eps}, {e.sim.R});
    REQUIRE(sw.entries.size() == 1);
    e.sim.lift_initial = true;
    CHECK(sw.entries[0].report == run_ensemble(e));
    CHECK_THROWS(regularization_sweep(e, {}, {0.01}, {10.0}));
}
