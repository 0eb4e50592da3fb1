#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "stfe/grid.hpp"
#include "stfe/mobility.hpp"
#include "stfe/noise.hpp"
#include "stfe/params.hpp"

namespace stfe {

enum class Scheme { Explicit, SemiImplicit };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

struct SimConfig {
    ParamSet params{};
    NoiseSpec noise = decay_noise(8, 3.0, 0.5);
    int m = 64;
    // Zero selects the default for the scheme. The step is then shortened so
    // that T_end is a whole number of steps.
    double dt = 0.0;
    double T_end = 0.05;
    double R = 10.0;
    Scheme scheme = Scheme::SemiImplicit;
    MobilityKind mobility = MobilityKind::Fde;
    InitialProfile profile{};
    std::uint64_t seed = 0;
    std::uint64_t path = 0;
    // Adds delta to the initial profile.
    bool lift_initial = false;
    // Empty selects 100 per unit time plus t = 0 and T_end; times are snapped
    // to the nearest step.
    std::vector<double> report_times;
    bool keep_increments = true;
    bool keep_states = true;
    bool parallel_kernels = false;
};

// Throws ConfigError for invalid settings.
void validate_config(const SimConfig& cfg);

// C^2 bump: 1 on [0, 1], 0 on [2, inf), 1 - S(r - 1) with S(t) = 6t^5 - 15t^4 + 10t^3 between.
double cutoff_g(double r);
// g(max_j |u_j| / R)
double cutoff_factor(const GridState& s, double R);

// -D[M D3 u] in flux form with face-averaged F^2.
std::vector<double> deterministic_drift(const GridState& s, const Mobility& F);

// Same with a caller-supplied face mobility (test hook for frozen M).
std::vector<double> drift_with_faces(const GridState& s, std::span<const double> M);

double default_dt(const SimConfig& cfg, const GridState& initial);

// Owns per-path buffers and the sparse factorization for the implicit solve.
class Stepper {
public:
    Stepper(const SimConfig& cfg, const NoiseField& field);
    ~Stepper();
    Stepper(Stepper&&) noexcept;
    Stepper& operator=(Stepper&&) noexcept;

    // One step of length dt with the given Brownian increments.
    GridState step(const GridState& s, double dt, std::span<const double> dbeta);

    const Mobility& mobility() const { return F_; }

    // Face mobility at the state passed to the last step call.
    const std::vector<double>& last_faces() const;

private:
    struct Impl;
    SimConfig cfg_;
    const NoiseField* field_;  // must outlive the stepper
    Mobility F_;
    std::unique_ptr<Impl> impl_;
};

// One step drawing fresh increments from rng.
GridState step(const GridState& s, const SimConfig& cfg, const NoiseField& field, double dt,
               std::mt19937_64& rng);

struct Trajectory {
    SimConfig config;
    double dt = 0.0;
    long steps = 0;
    std::vector<long> report_steps;
    std::vector<GridState> states;                 // at report steps
    std::vector<std::vector<double>> increments;   // one vector per step
    // Running quantities over every step.
    double min_u = 0.0;
    double max_u = 0.0;
    double max_mass_drift = 0.0;
    // Left-endpoint time integrals of h sum M (D+ Lap u)^2 and h sum (Lap u)^2.
    double int_F2_d3u = 0.0;
    double int_d2u = 0.0;
    // Number of steps with cutoff factor below one.
    long cutoff_active_steps = 0;
};

GridState initial_state(const SimConfig& cfg);

// Step length, step count and report steps simulate_path will use.
struct Schedule {
    double dt = 0.0;
    long steps = 0;
    std::vector<long> report_steps;
};
Schedule schedule_for(const SimConfig& cfg);

// Runs one path. Increments for step i come from make_rng(seed, path, i).
// Throws BlowupDetected (with the step index) on non-finite values or when the
// state leaves the mobility's domain.
Trajectory simulate_path(const SimConfig& cfg);
Trajectory simulate_path(const SimConfig& cfg, const NoiseField& field);

// Replays a path from given increments (one vector per step) with step dt.
Trajectory replay_path(const SimConfig& cfg, const NoiseField& field, double dt,
                       const std::vector<std::vector<double>>& increments);

}  // namespace stfe
