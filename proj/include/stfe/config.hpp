#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stfe/ensemble.hpp"
#include "stfe/solver.hpp"

namespace stfe {

// A parsed run configuration. Unknown keys anywhere are rejected with a
// ConfigError naming the key.
//
// {
//   "params":  {"n": 2.5, "nu": 3.25, "delta": 0.1, "eps": 0.01},   nu optional
//   "noise":   {"k_max": 8, "decay_exponent": 3, "amplitude": 0.5}
//              | {"lambda": {"-1": 0.2, "0": 0.1, "1": 0.2}} | "zero",
//   "grid":    {"m": 64},
//   "time":    {"dt": 0, "T_end": 0.05, "report_times": []},
//   "R": 10, "scheme": "semi_implicit", "mobility": "Fde",
//   "profile": {"kind": "perturbed_constant", "c": 1, "a": 0.3, "k": 1},
//   "seed": 0, "lift_initial": false,
//   "ensemble": {"n_paths": 100, "moment_powers": [2], "q": 1,
//                "deltas": [0.1, 0.05, 0.025], "threshold": 3, "output_dir": "out"}
// }
struct RunConfig {
    EnsembleConfig ensemble;
    std::vector<double> deltas{0.1, 0.05, 0.025};
    double threshold = 3.0;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig parse_run_config_text(const std::string& text);
// Throws IoError when the file cannot be read, ConfigError when it is invalid.
RunConfig load_run_config(const std::string& path);

}  // namespace stfe
