#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stfe/solver.hpp"

namespace stfe {

struct EnsembleConfig {
    SimConfig sim{};
    int n_paths = 100;
    // p in E[sup Q^{p/2}] for the energy-class quantities.
    std::vector<double> moment_powers{2.0};
    // q for the entropy-class quantities sup ||u^{2-n}||_1^q and (int int (D2 u)^2)^q.
    double q = 1.0;
    std::string output_dir = "out";
};

// Throws ConfigError.
void validate_ensemble(const EnsembleConfig& cfg);

// Per-path values at the report times, and the path totals.
struct PathRecord {
    int path = 0;
    bool completed = false;
    long blowup_step = -1;
    std::string error;
    std::vector<double> t;
    std::vector<double> energy;       // (1/2) h sum (D+ u)^2
    std::vector<double> log_entropy;  // h sum (u - 1) - log u; inf when min u <= 0
    std::vector<double> u_pow_l1;     // h sum u^{2-n}; inf when min u <= 0
    std::vector<double> min_u;
    double int_F2_d3u = 0.0;  // int_0^T h sum M (D+ Lap u)^2 dt
    double int_d2u = 0.0;     // int_0^T h sum (Lap u)^2 dt
    double path_min_u = 0.0;  // over every step
    double max_mass_drift = 0.0;

    bool operator==(const PathRecord&) const = default;
};

struct MomentRow {
    std::string quantity;
    double power = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    int n = 0;  // completed paths used

    bool operator==(const MomentRow&) const = default;
};

// Quantity names used in MomentRow::quantity.
inline constexpr const char* kSupEnergy = "sup_energy";            // E[sup_t E^{p/2}]
inline constexpr const char* kSupLogEntropy = "sup_log_entropy";   // E[(sup_t LE)^{p/2}]
inline constexpr const char* kIntF2D3u = "int_F2_d3u";             // E[(int F^2 (d3 u)^2)^{p/2}]
inline constexpr const char* kSupUPow = "sup_u_pow_2mn_l1";        // E[sup_t ||u^{2-n}||_1^q]
inline constexpr const char* kIntD2u = "int_d2u";                  // E[(int (d2 u)^2)^q]

struct MomentReport {
    int schema_version = 1;
    // Echo of the run.
    double n = 0.0, nu = 0.0, delta = 0.0, eps = 0.0, R = 0.0;
    int m = 0;
    double dt = 0.0;
    double T_end = 0.0;
    std::uint64_t seed = 0;
    int n_paths = 0;
    int completed = 0;
    int blowups = 0;
    double min_u = 0.0;  // over completed paths
    double max_mass_drift = 0.0;
    std::vector<MomentRow> rows;
    std::vector<PathRecord> paths;  // in path-index order

    bool operator==(const MomentReport&) const = default;
};

// Paths run in parallel and are aggregated by index, so the report does not
// depend on the thread count.
MomentReport run_ensemble(const EnsembleConfig& cfg);

// Moment rows from finished path records (the aggregation step of run_ensemble).
std::vector<MomentRow> moment_rows(const std::vector<PathRecord>& paths,
                                   const std::vector<double>& powers, double q);

struct UniformityVerdict {
    std::string quantity;
    double power = 0.0;
    // Conservative growth between consecutive deltas:
    // max(est_next - 2 se_next, 0) / (est_prev + 2 se_prev).
    std::vector<double> growth;
    double max_growth = 0.0;
    bool pass = true;
};

struct UniformityStudy {
    int schema_version = 1;
    std::vector<double> deltas;
    std::vector<MomentReport> reports;  // one per delta
    std::vector<UniformityVerdict> verdicts;
    double threshold = 3.0;
    int blowups = 0;
    double min_u = 0.0;
    bool pass = true;
};

// Runs the base ensemble at each delta (same seeds). deltas must be strictly
// decreasing with at least three entries. With control = true a column 1/delta
// joins the verdicts as a detector self-test.
UniformityStudy uniformity_study(const EnsembleConfig& base, const std::vector<double>& deltas,
                                 double threshold = 3.0, bool control = false);

struct SweepEntry {
    double delta = 0.0, eps = 0.0, R = 0.0;
    MomentReport report;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    // Verdicts over consecutive deltas at each fixed (eps, R).
    std::vector<UniformityVerdict> verdicts;
    double threshold = 3.0;
};

// Ensembles over every (delta, eps, R) tuple with the initial lift u0 + delta.
// deltas and epsilons strictly decreasing, Rs strictly increasing, all nonempty.
SweepReport regularization_sweep(const EnsembleConfig& base, const std::vector<double>& deltas,
                                 const std::vector<double>& epsilons,
                                 const std::vector<double>& Rs, double threshold = 3.0);

enum class ReportFormat { Csv, Json };

// Writes <dir>/<stem>.csv or .json and returns the path. Refuses to replace an
// existing file unless overwrite is set. Throws IoError naming the path.
std::string emit_report(const MomentReport& r, const std::string& dir, ReportFormat fmt,
                        bool overwrite, const std::string& stem = "ensemble");
std::string emit_report(const UniformityStudy& r, const std::string& dir, ReportFormat fmt,
                        bool overwrite, const std::string& stem = "uniformity");
std::string emit_report(const SweepReport& r, const std::string& dir, ReportFormat fmt,
                        bool overwrite, const std::string& stem = "sweep");

std::string to_json_string(const MomentReport& r);
MomentReport moment_report_from_json(const std::string& text);
std::string to_csv_string(const MomentReport& r);

// Throws IoError for an existing target without overwrite, or a failed write.
void write_text_file(const std::string& path, const std::string& text, bool overwrite);

}  // namespace stfe
