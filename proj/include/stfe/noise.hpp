#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace stfe {

// Mode amplitudes lambda_k for |k| <= k_max. Either a decay law
// lambda_k = amplitude |k|^{-q} (lambda_0 = amplitude) or an explicit map.
struct NoiseSpec {
    int k_max = 8;
    std::map<int, double> lambda;
    std::optional<double> decay_exponent;
    double amplitude = 0.5;

    double lambda_of(int k) const {
        auto it = lambda.find(k);
        return it == lambda.end() ? 0.0 : it->second;
    }
};

// Builds a decay-law spec; throws NoiseSpecError unless q > 5/2.
NoiseSpec decay_noise(int k_max, double q, double amplitude);
// Builds a spec from an explicit map; the map must be symmetric in k.
NoiseSpec explicit_noise(const std::map<int, double>& lambda);
// Spec with every amplitude zero (deterministic runs).
NoiseSpec zero_noise(int k_max = 0);
void validate_noise_spec(const NoiseSpec& spec);

// Periodic Laplace eigenbasis on [0, 1): sqrt(2) cos(2 pi k x) for k >= 1,
// 1 for k = 0, sqrt(2) sin(2 pi k x) for k <= -1.
double basis_e(int k, double x);

// sigma_k = lambda_k e_k sampled on x_j = j / m, with derivatives up to order
// four. Rows are ordered k = -k_max, ..., k_max. Derivatives are stored through
// d/dx sigma_k = 2 pi k sigma_{-k}, which therefore holds exactly.
class NoiseField {
public:
    NoiseField() = default;
    NoiseField(const NoiseSpec& spec, int m);

    int m() const { return m_; }
    int k_max() const { return k_max_; }
    int modes() const { return 2 * k_max_ + 1; }
    int mode_k(int row) const { return row - k_max_; }
    int row_of(int k) const { return k + k_max_; }
    double lambda(int row) const { return lambda_[row]; }
    bool is_zero() const { return zero_; }

    // Pointer to the m samples of the given derivative order (0..4) of one mode.
    const double* sigma(int row, int order = 0) const {
        return data_[order].data() + static_cast<std::size_t>(row) * m_;
    }
    // sum_k sigma_k(x_j)^2
    const std::vector<double>& sigma_sq_sum() const { return sigma_sq_sum_; }

private:
    int m_ = 0;
    int k_max_ = 0;
    bool zero_ = true;
    std::vector<double> lambda_;
    std::vector<double> data_[5];
    std::vector<double> sigma_sq_sum_;
};

NoiseField build_field(const NoiseSpec& spec, int m);

// One generator per (seed, path, step), so paths and steps can be drawn in any
// order or on any thread.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t path, std::uint64_t step);

// Independent N(0, dt) draws, one per mode of the field.
std::vector<double> sample_increments(const NoiseField& field, double dt, std::mt19937_64& rng);

struct CovarianceCheck {
    double max_abs_error = 0.0;
    // Largest |deviation| / standard error over all entries.
    double max_se_multiple = 0.0;
    int n_samples = 0;
};

// Samples B(t, x_j) = sum_k sigma_k(x_j) beta_k(t) and compares the sample
// covariance with t sum_k sigma_k(x_i) sigma_k(x_j).
CovarianceCheck covariance_check(const NoiseField& field, double t, int n_samples,
                                 std::mt19937_64& rng);

struct NormalityCheck {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double jarque_bera = 0.0;
    bool rejected = false;  // at the 1e-3 level
};

// Moment-based (Jarque-Bera) test on a sample.
NormalityCheck normality_check(const std::vector<double>& sample);

}  // namespace stfe
