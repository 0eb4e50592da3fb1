#include "stfe/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "stfe/errors.hpp"
#include "stfe/functionals.hpp"

namespace stfe {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_entropy_or_inf(const GridState& s) {
    double acc = 0.0;
    for (double v : s.u) {
        if (!(v > 0.0)) return kInf;
        acc += (v - 1.0) - std::log(v);
    }
    return s.h * acc;
}

double u_pow_or_inf(const GridState& s, double n) {
    double acc = 0.0;
    for (double v : s.u) {
        if (!(v > 0.0)) return kInf;
        acc += std::pow(v, 2.0 - n);
    }
    return s.h * acc;
}

PathRecord run_one(const EnsembleConfig& cfg, const NoiseField& field, const Schedule& sc, int path) {
    SimConfig c = cfg.sim;
    c.path = static_cast<std::uint64_t>(path);
    c.keep_increments = false;
    c.keep_states = true;
    PathRecord rec;
    rec.path = path;
    try {
        const Trajectory tr = simulate_path(c, field);
        for (const GridState& s : tr.states) {
            rec.t.push_back(s.t);
            rec.energy.push_back(energy(s));
            rec.log_entropy.push_back(log_entropy_or_inf(s));
            rec.u_pow_l1.push_back(u_pow_or_inf(s, c.params.n));
            rec.min_u.push_back(*std::min_element(s.u.begin(), s.u.end()));
        }
        rec.int_F2_d3u = tr.int_F2_d3u;
        rec.int_d2u = tr.int_d2u;
        rec.path_min_u = tr.min_u;
        rec.max_mass_drift = tr.max_mass_drift;
        rec.completed = true;
    } catch (const BlowupDetected& e) {
        rec.blowup_step = e.step;
        rec.error = e.what();
    } catch (const Error& e) {
        rec.error = e.what();
    }
    if (!rec.completed) {
        // Nominal report times with missing values, so every path has the same rows.
        rec.t.clear();
        for (long k : sc.report_steps) rec.t.push_back(k * sc.dt);
        const std::size_t K = rec.t.size();
        rec.energy.assign(K, kNaN);
        rec.log_entropy.assign(K, kNaN);
        rec.u_pow_l1.assign(K, kNaN);
        rec.min_u.assign(K, kNaN);
        rec.int_F2_d3u = rec.int_d2u = rec.path_min_u = rec.max_mass_drift = kNaN;
    }
    return rec;
}

double vmax(const std::vector<double>& v) {
    double m = -kInf;
    for (double x : v) m = std::max(m, x);
    return m;
}

MomentRow moment(const std::string& name, double power, const std::vector<double>& values) {
    MomentRow row;
    row.quantity = name;
    row.power = power;
    row.n = static_cast<int>(values.size());
    if (values.empty()) {
        row.estimate = row.std_error = kNaN;
        return row;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    row.estimate = mean;
    if (!std::isfinite(mean)) {
        row.std_error = kInf;
        return row;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double N = static_cast<double>(values.size());
    row.std_error = values.size() > 1 ? std::sqrt(ss / (N - 1.0) / N) : 0.0;
    return row;
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) {
    if (std::isfinite(v)) return v;
    return num(v);
}

double from_jnum(const json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "nan") return kNaN;
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ConfigError("unexpected numeric field '" + s + "'");
}

json jvec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(jnum(x));
    return a;
}

std::vector<double> from_jvec(const json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(from_jnum(x));
    return out;
}

json to_json(const MomentRow& r) {
    return json{{"quantity", r.quantity}, {"power", jnum(r.power)}, {"estimate", jnum(r.estimate)},
                {"std_error", jnum(r.std_error)}, {"n", r.n}};
}

json to_json(const MomentReport& r, bool with_paths = true) {
    json j;
    j["schema_version"] = r.schema_version;
    j["params"] = {{"n", r.n}, {"nu", r.nu}, {"delta", r.delta}, {"eps", r.eps}};
    j["R"] = jnum(r.R);
    j["m"] = r.m;
    j["dt"] = jnum(r.dt);
    j["T_end"] = jnum(r.T_end);
    j["seed"] = r.seed;
    j["n_paths"] = r.n_paths;
    j["completed"] = r.completed;
    j["blowups"] = r.blowups;
    j["min_u"] = jnum(r.min_u);
    j["max_mass_drift"] = jnum(r.max_mass_drift);
    json rows = json::array();
    for (const auto& row : r.rows) rows.push_back(to_json(row));
    j["moments"] = rows;
    if (with_paths) {
        json paths = json::array();
        for (const auto& p : r.paths) {
            paths.push_back({{"path", p.path},
                             {"completed", p.completed},
                             {"blowup_step", p.blowup_step},
                             {"error", p.error},
                             {"t", jvec(p.t)},
                             {"energy", jvec(p.energy)},
                             {"log_entropy", jvec(p.log_entropy)},
                             {"u_pow_l1", jvec(p.u_pow_l1)},
                             {"min_u", jvec(p.min_u)},
                             {"int_F2_d3u", jnum(p.int_F2_d3u)},
                             {"int_d2u", jnum(p.int_d2u)},
                             {"path_min_u", jnum(p.path_min_u)},
                             {"max_mass_drift", jnum(p.max_mass_drift)}});
        }
        j["paths"] = paths;
    }
    return j;
}

json to_json(const UniformityVerdict& v) {
    return json{{"quantity", v.quantity}, {"power", jnum(v.power)}, {"growth", jvec(v.growth)},
                {"max_growth", jnum(v.max_growth)}, {"pass", v.pass}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string target(const std::string& dir, const std::string& stem, ReportFormat fmt) {
    return (std::filesystem::path(dir) / (stem + (fmt == ReportFormat::Json ? ".json" : ".csv")))
        .string();
}

// Verdicts over a sequence of reports ordered by decreasing delta.
std::vector<UniformityVerdict> verdicts_for(const std::vector<const MomentReport*>& seq,
                                            double threshold, const std::string& suffix) {
    std::vector<UniformityVerdict> out;
    if (seq.size() < 2) return out;
    const auto& first_rows = seq.front()->rows;
    for (std::size_t k = 0; k < first_rows.size(); ++k) {
        UniformityVerdict v;
        v.quantity = first_rows[k].quantity + suffix;
        v.power = first_rows[k].power;
        for (std::size_t i = 1; i < seq.size(); ++i) {
            const MomentRow& a = seq[i - 1]->rows[k];
            const MomentRow& b = seq[i]->rows[k];
            const double den = a.estimate + 2.0 * a.std_error;
            const double numr = std::max(b.estimate - 2.0 * b.std_error, 0.0);
            double g;
            if (std::isnan(numr) || std::isnan(den)) g = kInf;
            else if (den > 0.0) g = numr / den;
            else g = numr > 0.0 ? kInf : 0.0;
            v.growth.push_back(g);
        }
        v.max_growth = vmax(v.growth);
        v.pass = v.max_growth <= threshold;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

void validate_ensemble(const EnsembleConfig& cfg) {
    validate_config(cfg.sim);
    if (cfg.n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (cfg.moment_powers.empty()) throw ConfigError("moment_powers must not be empty");
    for (double p : cfg.moment_powers)
        if (!(p >= 1.0)) throw ConfigError("every moment power must be >= 1");
    if (!(cfg.q > 0.0)) throw ConfigError("q must be positive");
}

std::vector<MomentRow> moment_rows(const std::vector<PathRecord>& paths,
                                   const std::vector<double>& powers, double q) {
    std::vector<double> sup_e, sup_le, intF, sup_up, intd;
    for (const auto& p : paths) {
        if (!p.completed) continue;
        sup_e.push_back(vmax(p.energy));
        sup_le.push_back(vmax(p.log_entropy));
        intF.push_back(p.int_F2_d3u);
        sup_up.push_back(vmax(p.u_pow_l1));
        intd.push_back(p.int_d2u);
    }
    auto powered = [](const std::vector<double>& v, double e) {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::pow(v[i], e);
        return out;
    };
    std::vector<MomentRow> rows;
    for (double p : powers) {
        rows.push_back(moment(kSupEnergy, p, powered(sup_e, 0.5 * p)));
        rows.push_back(moment(kSupLogEntropy, p, powered(sup_le, 0.5 * p)));
        rows.push_back(moment(kIntF2D3u, p, powered(intF, 0.5 * p)));
    }
    rows.push_back(moment(kSupUPow, q, powered(sup_up, q)));
    rows.push_back(moment(kIntD2u, q, powered(intd, q)));
    return rows;
}

MomentReport run_ensemble(const EnsembleConfig& cfg) {
    validate_ensemble(cfg);
    const NoiseField field(cfg.sim.noise, cfg.sim.m);
    const Schedule sc = schedule_for(cfg.sim);

    MomentReport r;
    r.n = cfg.sim.params.n;
    r.nu = cfg.sim.params.nu;
    r.delta = cfg.sim.params.delta;
    r.eps = cfg.sim.params.eps;
    r.R = cfg.sim.R;
    r.m = cfg.sim.m;
    r.dt = sc.dt;
    r.T_end = cfg.sim.T_end;
    r.seed = cfg.sim.seed;
    r.n_paths = cfg.n_paths;
    r.paths.resize(cfg.n_paths);

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.n_paths; ++i) r.paths[i] = run_one(cfg, field, sc, i);

    r.min_u = kInf;
    for (const auto& p : r.paths) {
        if (p.completed) {
            ++r.completed;
            r.min_u = std::min(r.min_u, p.path_min_u);
            r.max_mass_drift = std::max(r.max_mass_drift, p.max_mass_drift);
        } else {
            ++r.blowups;
        }
    }
    if (r.completed == 0) r.min_u = kNaN;
    r.rows = moment_rows(r.paths, cfg.moment_powers, cfg.q);
    return r;
}

UniformityStudy uniformity_study(const EnsembleConfig& base, const std::vector<double>& deltas,
                                 double threshold, bool control) {
    if (deltas.size() < 3) throw PreconditionError("uniformity study needs at least three deltas");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw PreconditionError("deltas must be strictly decreasing");
    if (!(threshold > 1.0)) throw PreconditionError("threshold must exceed 1");

    UniformityStudy st;
    st.deltas = deltas;
    st.threshold = threshold;
    st.min_u = kInf;
    for (double d : deltas) {
        EnsembleConfig c = base;
        const ParamSet& p = base.sim.params;
        c.sim.params = validate_params(p.n, p.nu, d, p.eps);
        st.reports.push_back(run_ensemble(c));
        st.blowups += st.reports.back().blowups;
        if (st.reports.back().completed > 0) st.min_u = std::min(st.min_u, st.reports.back().min_u);
    }
    std::vector<MomentReport> with_control;
    std::vector<const MomentReport*> seq;
    if (control) {
        with_control = st.reports;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            MomentRow row;
            row.quantity = "control_inv_delta";
            row.power = 1.0;
            row.estimate = 1.0 / deltas[i];
            row.n = with_control[i].completed;
            with_control[i].rows.push_back(row);
        }
        for (const auto& r : with_control) seq.push_back(&r);
    } else {
        for (const auto& r : st.reports) seq.push_back(&r);
    }
    st.verdicts = verdicts_for(seq, threshold, "");
    st.pass = std::all_of(st.verdicts.begin(), st.verdicts.end(),
                          [](const UniformityVerdict& v) { return v.pass; });
    return st;
}

SweepReport regularization_sweep(const EnsembleConfig& base, const std::vector<double>& deltas,
                                 const std::vector<double>& epsilons,
                                 const std::vector<double>& Rs, double threshold) {
    if (deltas.empty() || epsilons.empty() || Rs.empty())
        throw PreconditionError("sweep lists must be nonempty");
    auto strictly = [](const std::vector<double>& v, bool decreasing) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (decreasing ? !(v[i] < v[i - 1]) : !(v[i] > v[i - 1])) return false;
        return true;
    };
    if (!strictly(deltas, true) || !strictly(epsilons, true))
        throw PreconditionError("deltas and epsilons must be strictly decreasing");
    if (!strictly(Rs, false)) throw PreconditionError("Rs must be strictly increasing");

    SweepReport sw;
    sw.threshold = threshold;
    const ParamSet& p = base.sim.params;
    for (double R : Rs) {
        for (double e : epsilons) {
            std::vector<const MomentReport*> seq;
            const std::size_t start = sw.entries.size();
            for (double d : deltas) {
                EnsembleConfig c = base;
                c.sim.params = validate_params(p.n, p.nu, d, e);
                c.sim.R = R;
                c.sim.lift_initial = true;
                sw.entries.push_back({d, e, R, run_ensemble(c)});
            }
            for (std::size_t i = start; i < sw.entries.size(); ++i) seq.push_back(&sw.entries[i].report);
            std::ostringstream suffix;
            suffix << "@eps=" << num(e) << ",R=" << num(R);
            for (auto& v : verdicts_for(seq, threshold, suffix.str())) sw.verdicts.push_back(std::move(v));
        }
    }
    return sw;
}

std::string to_json_string(const MomentReport& r) { return dump(to_json(r)); }

MomentReport moment_report_from_json(const std::string& text) {
    MomentReport r;
    try {
        const json j = json::parse(text);
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != 1)
            throw ConfigError("unsupported schema_version " + std::to_string(r.schema_version));
        const auto& p = j.at("params");
        r.n = p.at("n").get<double>();
        r.nu = p.at("nu").get<double>();
        r.delta = p.at("delta").get<double>();
        r.eps = p.at("eps").get<double>();
        r.R = from_jnum(j.at("R"));
        r.m = j.at("m").get<int>();
        r.dt = from_jnum(j.at("dt"));
        r.T_end = from_jnum(j.at("T_end"));
        r.seed = j.at("seed").get<std::uint64_t>();
        r.n_paths = j.at("n_paths").get<int>();
        r.completed = j.at("completed").get<int>();
        r.blowups = j.at("blowups").get<int>();
        r.min_u = from_jnum(j.at("min_u"));
        r.max_mass_drift = from_jnum(j.at("max_mass_drift"));
        for (const auto& row : j.at("moments")) {
            r.rows.push_back({row.at("quantity").get<std::string>(), from_jnum(row.at("power")),
                              from_jnum(row.at("estimate")), from_jnum(row.at("std_error")),
                              row.at("n").get<int>()});
        }
        if (j.contains("paths")) {
            for (const auto& q : j.at("paths")) {
                PathRecord rec;
                rec.path = q.at("path").get<int>();
                rec.completed = q.at("completed").get<bool>();
                rec.blowup_step = q.at("blowup_step").get<long>();
                rec.error = q.at("error").get<std::string>();
                rec.t = from_jvec(q.at("t"));
                rec.energy = from_jvec(q.at("energy"));
                rec.log_entropy = from_jvec(q.at("log_entropy"));
                rec.u_pow_l1 = from_jvec(q.at("u_pow_l1"));
                rec.min_u = from_jvec(q.at("min_u"));
                rec.int_F2_d3u = from_jnum(q.at("int_F2_d3u"));
                rec.int_d2u = from_jnum(q.at("int_d2u"));
                rec.path_min_u = from_jnum(q.at("path_min_u"));
                rec.max_mass_drift = from_jnum(q.at("max_mass_drift"));
                r.paths.push_back(std::move(rec));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string to_csv_string(const MomentReport& r) {
    std::ostringstream os;
    os << "kind,path,t,energy,log_entropy,u_pow_l1,min_u,quantity,power,estimate,std_error,n\n";
    for (const auto& p : r.paths) {
        for (std::size_t i = 0; i < p.t.size(); ++i) {
            os << "path," << p.path << ',' << num(p.t[i]) << ',' << num(p.energy[i]) << ','
               << num(p.log_entropy[i]) << ',' << num(p.u_pow_l1[i]) << ',' << num(p.min_u[i])
               << ",,,,,\n";
        }
    }
    for (const auto& row : r.rows) {
        os << "moment,,,,,,," << row.quantity << ',' << num(row.power) << ',' << num(row.estimate)
           << ',' << num(row.std_error) << ',' << row.n << '\n';
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text, bool overwrite) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path target_path(path);
    if (fs::exists(target_path, ec) && !overwrite)
        throw IoError("refusing to overwrite existing file " + path + " (pass --overwrite)");
    if (target_path.has_parent_path()) {
        fs::create_directories(target_path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + target_path.parent_path().string() + ": " +
                              ec.message());
    }
    std::ofstream out(target_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write failed for " + path);
}

std::string emit_report(const MomentReport& r, const std::string& dir, ReportFormat fmt,
                        bool overwrite, const std::string& stem) {
    const std::string path = target(dir, stem, fmt);
    write_text_file(path, fmt == ReportFormat::Json ? to_json_string(r) : to_csv_string(r), overwrite);
    return path;
}

std::string emit_report(const UniformityStudy& st, const std::string& dir, ReportFormat fmt,
                        bool overwrite, const std::string& stem) {
    const std::string path = target(dir, stem, fmt);
    std::string text;
    if (fmt == ReportFormat::Json) {
        json j;
        j["schema_version"] = st.schema_version;
        j["deltas"] = jvec(st.deltas);
        j["threshold"] = jnum(st.threshold);
        j["blowups"] = st.blowups;
        j["min_u"] = jnum(st.min_u);
        j["pass"] = st.pass;
        json reps = json::array();
        for (const auto& r : st.reports) reps.push_back(to_json(r, false));
        j["reports"] = reps;
        json ver = json::array();
        for (const auto& v : st.verdicts) ver.push_back(to_json(v));
        j["verdicts"] = ver;
        text = dump(j);
    } else {
        std::ostringstream os;
        os << "kind,delta,quantity,power,estimate,std_error,n,blowups,min_u,max_growth,pass\n";
        for (std::size_t i = 0; i < st.reports.size(); ++i) {
            const auto& r = st.reports[i];
            for (const auto& row : r.rows)
                os << "row," << num(st.deltas[i]) << ',' << row.quantity << ',' << num(row.power)
                   << ',' << num(row.estimate) << ',' << num(row.std_error) << ',' << row.n << ','
                   << r.blowups << ',' << num(r.min_u) << ",,\n";
        }
        for (const auto& v : st.verdicts)
            os << "verdict,," << v.quantity << ',' << num(v.power) << ",,,,,," << num(v.max_growth)
               << ',' << (v.pass ? "pass" : "fail") << '\n';
        text = os.str();
    }
    write_text_file(path, text, overwrite);
    return path;
}

std::string emit_report(const SweepReport& sw, const std::string& dir, ReportFormat fmt,
                        bool overwrite, const std::string& stem) {
    const std::string path = target(dir, stem, fmt);
    std::string text;
    if (fmt == ReportFormat::Json) {
        json j;
        j["schema_version"] = 1;
        j["threshold"] = jnum(sw.threshold);
        json entries = json::array();
        for (const auto& e : sw.entries)
            entries.push_back({{"delta", e.delta}, {"eps", e.eps}, {"R", e.R},
                               {"report", to_json(e.report, false)}});
        j["entries"] = entries;
        json ver = json::array();
        for (const auto& v : sw.verdicts) ver.push_back(to_json(v));
        j["verdicts"] = ver;
        text = dump(j);
    } else {
        std::ostringstream os;
        os << "kind,delta,eps,R,quantity,power,estimate,std_error,n,blowups,min_u,max_growth,pass\n";
        for (const auto& e : sw.entries)
            for (const auto& row : e.report.rows)
                os << "row," << num(e.delta) << ',' << num(e.eps) << ',' << num(e.R) << ','
                   << row.quantity << ',' << num(row.power) << ',' << num(row.estimate) << ','
                   << num(row.std_error) << ',' << row.n << ',' << e.report.blowups << ','
                   << num(e.report.min_u) << ",,\n";
        for (const auto& v : sw.verdicts)
            os << "verdict,,,," << v.quantity << ',' << num(v.power) << ",,,,,," << num(v.max_growth)
               << ',' << (v.pass ? "pass" : "fail") << '\n';
        text = os.str();
    }
    write_text_file(path, text, overwrite);
    return path;
}

}  // namespace stfe
