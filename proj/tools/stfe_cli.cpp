// stfe command line driver.
//
// Exit codes: 0 pass, 1 check failure, 2 config error, 3 runtime failure.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stfe/config.hpp"
#include "stfe/ensemble.hpp"
#include "stfe/errors.hpp"
#include "stfe/functionals.hpp"
#include "stfe/inequalities.hpp"
#include "stfe/mobility.hpp"
#include "stfe/noise.hpp"
#include "stfe/regularized_functionals.hpp"
#include "stfe/solver.hpp"

namespace {

using namespace stfe;
using nlohmann::json;

enum Exit { kPass = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeFailure = 3 };

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    bool overwrite = false;
    int threads = 0;
};

std::string g(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(g(v)); }

RunConfig load(const Common& c) {
    RunConfig rc = c.config.empty() ? parse_run_config(json::object()) : load_run_config(c.config);
    if (c.seed_set) rc.ensemble.sim.seed = c.seed;
    if (!c.out.empty()) rc.ensemble.output_dir = c.out;
    return rc;
}

std::string out_dir(const Common& c, const RunConfig& rc) {
    return c.out.empty() ? rc.ensemble.output_dir : c.out;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

int cmd_validate(const Common& c) {
    const RunConfig rc = load(c);
    const Schedule sc = schedule_for(rc.ensemble.sim);
    std::cout << "config ok: m=" << rc.ensemble.sim.m << " dt=" << g(sc.dt) << " steps=" << sc.steps
              << " n_paths=" << rc.ensemble.n_paths << "\n";
    return kPass;
}

int cmd_simulate(const Common& c, long path) {
    RunConfig rc = load(c);
    SimConfig cfg = rc.ensemble.sim;
    cfg.path = static_cast<std::uint64_t>(path);
    cfg.keep_increments = false;
    const NoiseField field(cfg.noise, cfg.m);
    const Trajectory tr = simulate_path(cfg, field);
    const std::string dir = out_dir(c, rc);

    std::ostringstream traj;
    traj << "t,x,u\n";
    for (const auto& s : tr.states)
        for (int j = 0; j < s.m(); ++j) traj << g(s.t) << ',' << g(j * s.h) << ',' << g(s.u[j]) << '\n';
    write_text_file(join(dir, "trajectory.csv"), traj.str(), c.overwrite);

    std::ostringstream fs;
    fs << kFunctionalColumns << '\n';
    for (const auto& r : report_series(tr, default_alpha(cfg.params.n))) fs << csv_row(r) << '\n';
    write_text_file(join(dir, "functionals.csv"), fs.str(), c.overwrite);
    std::cout << "wrote " << tr.states.size() << " states to " << dir << "\n";
    return kPass;
}

int cmd_ensemble(const Common& c, const std::string& format) {
    const RunConfig rc = load(c);
    const MomentReport r = run_ensemble(rc.ensemble);
    const auto fmt = format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
    const std::string path = emit_report(r, out_dir(c, rc), fmt, c.overwrite);
    std::cout << "completed " << r.completed << "/" << r.n_paths << ", blow-ups " << r.blowups
              << ", min u " << g(r.min_u) << "\nwrote " << path << "\n";
    return r.blowups == 0 ? kPass : kCheckFailure;
}

int cmd_sweep(const Common& c, bool control) {
    const RunConfig rc = load(c);
    const UniformityStudy st = uniformity_study(rc.ensemble, rc.deltas, rc.threshold, control);
    const std::string dir = out_dir(c, rc);
    emit_report(st, dir, ReportFormat::Json, c.overwrite);
    const std::string path = emit_report(st, dir, ReportFormat::Csv, c.overwrite);
    for (const auto& v : st.verdicts)
        std::cout << (v.pass ? "ok   " : "FAIL ") << v.quantity << " p=" << g(v.power)
                  << " max growth " << g(v.max_growth) << "\n";
    std::cout << "blow-ups " << st.blowups << ", min u " << g(st.min_u) << "\nwrote " << path << "\n";
    return st.pass && st.blowups == 0 ? kPass : kCheckFailure;
}

json params_json(const ParamSet& p) {
    return {{"n", p.n}, {"nu", p.nu}, {"delta", p.delta}, {"eps", p.eps}};
}

int cmd_check_inequalities(const Common& c) {
    ScanGrid grid = default_scan_grid();
    if (!c.config.empty()) grid.params = {load(c).ensemble.sim.params};
    const std::string dir = c.out.empty() ? "out/inequalities" : c.out;
    const auto reports = check_all(grid);

    std::ostringstream csv;
    csv << "id,domain,max_ratio,witness_r,sweep_max_ratio,uniformity_spread,points,pass,uniform\n";
    bool all_pass = true;
    for (const auto& r : reports) {
        const BoundSpec& spec = bound_spec(r.id);
        json j{{"id", r.id},
               {"statement", spec.statement},
               {"domain", to_string(spec.domain)},
               {"max_ratio", jnum(r.max_ratio)},
               {"witness_r", jnum(r.witness_r)},
               {"witness_params", params_json(r.witness_params)},
               {"sweep_max_ratio", jnum(r.sweep_max_ratio)},
               {"sweep_witness_r", jnum(r.sweep_witness_r)},
               {"sweep_witness_params", params_json(r.sweep_witness_params)},
               {"uniformity_spread", jnum(r.uniformity_spread)},
               {"points", r.points},
               {"pass", r.pass},
               {"uniform", r.uniform},
               {"message", r.message}};
        if (spec.exact_constant) j["exact_constant"] = *spec.exact_constant;
        write_text_file(join(dir, "bound_" + std::to_string(r.id) + ".json"), j.dump(2) + "\n", c.overwrite);
        csv << r.id << ',' << to_string(spec.domain) << ',' << g(r.max_ratio) << ',' << g(r.witness_r)
            << ',' << g(r.sweep_max_ratio) << ',' << g(r.uniformity_spread) << ',' << r.points << ','
            << (r.pass ? "pass" : "fail") << ',' << (r.uniform ? "yes" : "no") << '\n';
        std::printf("%-5s eq %3d  max ratio %-12.6g spread %-10.4g %s\n", r.pass ? "ok" : "FAIL", r.id,
                    r.max_ratio, r.uniformity_spread, r.uniform ? "" : "(not uniform)");
        all_pass = all_pass && r.pass;
    }
    write_text_file(join(dir, "summary.csv"), csv.str(), c.overwrite);
    return all_pass ? kPass : kCheckFailure;
}

int cmd_noise_stats(const Common& c, int samples, double t) {
    const RunConfig rc = load(c);
    const NoiseField field(rc.ensemble.sim.noise, rc.ensemble.sim.m);
    auto rng = make_rng(rc.ensemble.sim.seed, 0, 0);
    const CovarianceCheck cc = covariance_check(field, t, samples, rng);
    std::cout << "samples " << cc.n_samples << ", max |error| " << g(cc.max_abs_error)
              << ", max error / se " << g(cc.max_se_multiple) << "\n";
    return cc.max_se_multiple <= 5.0 ? kPass : kCheckFailure;
}

int cmd_tabulate(const Common& c, double r_min, double r_max, int points) {
    if (!(r_min > 0.0) || !(r_max > r_min) || points < 2)
        throw ConfigError("tabulate needs 0 < r_min < r_max and at least two points");
    const ParamSet p = load(c).ensemble.sim.params;
    std::ostringstream os;
    os << "r,F0,F0_d1,F0_d2,Fdelta,Fdelta_d1,Fdelta_d2,Fde,Fde_d1,Fde_d2,J,L,G,H\n";
    for (int i = 0; i < points; ++i) {
        const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (points - 1));
        const Jet a = F0(r, p.n), b = Fdelta(r, p), d = Fde(r, p);
        os << g(r) << ',' << g(a.f) << ',' << g(a.d1) << ',' << g(a.d2) << ',' << g(b.f) << ','
           << g(b.d1) << ',' << g(b.d2) << ',' << g(d.f) << ',' << g(d.d1) << ',' << g(d.d2) << ','
           << g(J_of(Family::DeltaEps, r, p)) << ',' << g(L_of(Family::DeltaEps, r, p)) << ','
           << g(G_of(Family::DeltaEps, r, p)) << ',' << g(H_of(Family::DeltaEps, r, p)) << '\n';
    }
    if (c.out.empty()) {
        std::cout << os.str();
    } else {
        write_text_file(join(c.out, "tabulate.csv"), os.str(), c.overwrite);
    }
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic thin-film simulator and inequality checker"};
    app.require_subcommand(1);
    Common c;

    auto common = [&c](CLI::App* sub) {
        sub->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option_function<std::uint64_t>(
            "--seed", [&c](const std::uint64_t& s) { c.seed = s; c.seed_set = true; }, "master seed");
        sub->add_option("--out", c.out, "output directory");
        sub->add_flag("--overwrite", c.overwrite, "replace existing output files");
        sub->add_option("--threads", c.threads, "worker threads (0 = OpenMP default)")
            ->check(CLI::NonNegativeNumber);
    };

    long path = 0;
    std::string format = "json";
    bool control = false;
    int samples = 10000;
    double t_cov = 1.0;
    double r_min = 1e-3, r_max = 1e3;
    int points = 61;

    auto* validate = app.add_subcommand("validate", "check a configuration and exit");
    auto* simulate = app.add_subcommand("simulate", "run one path and write the trajectory");
    auto* ensemble = app.add_subcommand("ensemble", "run an ensemble and write the moment report");
    auto* sweep = app.add_subcommand("sweep", "delta-uniformity study over ensemble.deltas");
    auto* ineq = app.add_subcommand("check-inequalities", "scan every registered bound");
    auto* noise = app.add_subcommand("noise-stats", "sample covariance of the noise field");
    auto* tab = app.add_subcommand("tabulate", "mobility and functional values on a log grid");
    for (auto* s : {validate, simulate, ensemble, sweep, ineq, noise, tab}) common(s);
    simulate->add_option("--path", path, "path index")->check(CLI::NonNegativeNumber);
    ensemble->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_flag("--control", control, "add the 1/delta detector column");
    noise->add_option("--samples", samples)->check(CLI::PositiveNumber);
    noise->add_option("--t", t_cov)->check(CLI::PositiveNumber);
    tab->add_option("--r-min", r_min);
    tab->add_option("--r-max", r_max);
    tab->add_option("--points", points);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }
    if (c.threads > 0) omp_set_num_threads(c.threads);

    try {
        if (*validate) return cmd_validate(c);
        if (*simulate) return cmd_simulate(c, path);
        if (*ensemble) return cmd_ensemble(c, format);
        if (*sweep) return cmd_sweep(c, control);
        if (*ineq) return cmd_check_inequalities(c);
        if (*noise) return cmd_noise_stats(c, samples, t_cov);
        if (*tab) return cmd_tabulate(c, r_min, r_max, points);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
    return kPass;
}
