#include "stfe/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "stfe/errors.hpp"
#include "stfe/params.hpp"

namespace stfe {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

double num(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

long integer(const json& obj, const char* key, const std::string& where, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<long>();
}

std::vector<double> num_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::string str(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

NoiseSpec parse_noise(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "zero") return zero_noise();
        throw ConfigError("noise must be an object or \"zero\"");
    }
    if (j.contains("lambda")) {
        only_keys(j, "noise", {"lambda"});
        const json& lam = j.at("lambda");
        if (!lam.is_object()) throw ConfigError("noise.lambda must map mode indices to amplitudes");
        std::map<int, double> m;
        for (auto it = lam.begin(); it != lam.end(); ++it) {
            std::size_t used = 0;
            int k = 0;
            try {
                k = std::stoi(it.key(), &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != it.key().size())
                throw ConfigError("noise.lambda key '" + it.key() + "' is not an integer");
            if (!it.value().is_number()) throw ConfigError("noise.lambda values must be numbers");
            m[k] = it.value().get<double>();
        }
        return explicit_noise(m);
    }
    only_keys(j, "noise", {"k_max", "decay_exponent", "amplitude"});
    const int k_max = static_cast<int>(integer(j, "k_max", "noise", 8));
    const double amp = num(j, "amplitude", "noise", 0.5);
    if (amp == 0.0) return zero_noise(k_max);
    return decay_noise(k_max, num(j, "decay_exponent", "noise", 3.0), amp);
}

InitialProfile parse_profile(const json& j) {
    only_keys(j, "profile", {"kind", "c", "a", "k", "center", "width"});
    InitialProfile p;
    p.kind = str(j, "kind", "profile", p.kind);
    p.c = num(j, "c", "profile", p.c);
    p.a = num(j, "a", "profile", p.a);
    p.k = static_cast<int>(integer(j, "k", "profile", p.k));
    p.center = num(j, "center", "profile", p.center);
    p.width = num(j, "width", "profile", p.width);
    return p;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    only_keys(j, "config", {"params", "noise", "grid", "time", "R", "scheme", "mobility", "profile",
                            "seed", "lift_initial", "ensemble"});
    RunConfig rc;
    SimConfig& s = rc.ensemble.sim;
    try {
        if (j.contains("params")) {
            const json& p = j.at("params");
            only_keys(p, "params", {"n", "nu", "delta", "eps"});
            const double n = num(p, "n", "params", 2.5);
            const double nu = p.contains("nu") ? num(p, "nu", "params", 0.0) : select_nu(n);
            s.params = validate_params(n, nu, num(p, "delta", "params", 0.1), num(p, "eps", "params", 0.01));
        }
        if (j.contains("noise")) s.noise = parse_noise(j.at("noise"));
        if (j.contains("grid")) {
            only_keys(j.at("grid"), "grid", {"m"});
            s.m = static_cast<int>(integer(j.at("grid"), "m", "grid", s.m));
        }
        if (j.contains("time")) {
            const json& t = j.at("time");
            only_keys(t, "time", {"dt", "T_end", "report_times"});
            s.dt = num(t, "dt", "time", s.dt);
            s.T_end = num(t, "T_end", "time", s.T_end);
            if (t.contains("report_times")) s.report_times = num_list(t.at("report_times"), "time.report_times");
        }
        s.R = num(j, "R", "config", s.R);
        if (j.contains("scheme")) s.scheme = parse_scheme(str(j, "scheme", "config", ""));
        if (j.contains("mobility")) s.mobility = parse_mobility(str(j, "mobility", "config", ""));
        if (j.contains("profile")) s.profile = parse_profile(j.at("profile"));
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
            s.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("lift_initial")) {
            if (!j.at("lift_initial").is_boolean()) throw ConfigError("lift_initial must be a boolean");
            s.lift_initial = j.at("lift_initial").get<bool>();
        }
        if (j.contains("ensemble")) {
            const json& e = j.at("ensemble");
            only_keys(e, "ensemble", {"n_paths", "moment_powers", "q", "deltas", "threshold", "output_dir"});
            EnsembleConfig& ec = rc.ensemble;
            ec.n_paths = static_cast<int>(integer(e, "n_paths", "ensemble", ec.n_paths));
            if (e.contains("moment_powers"))
                ec.moment_powers = num_list(e.at("moment_powers"), "ensemble.moment_powers");
            ec.q = num(e, "q", "ensemble", ec.q);
            if (e.contains("deltas")) rc.deltas = num_list(e.at("deltas"), "ensemble.deltas");
            rc.threshold = num(e, "threshold", "ensemble", rc.threshold);
            ec.output_dir = str(e, "output_dir", "ensemble", ec.output_dir);
        }
        validate_ensemble(rc.ensemble);
        // Catches profiles that are not positive on the grid.
        (void)initial_state(s);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

RunConfig parse_run_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_run_config(j);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_run_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace stfe
