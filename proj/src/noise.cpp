#include "stfe/noise.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stfe/errors.hpp"

namespace stfe {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Chi-square with two degrees of freedom at the 1e-3 level.
constexpr double kJarqueBeraCritical = 13.815510557964274;
}  // namespace

NoiseSpec decay_noise(int k_max, double q, double amplitude) {
    if (k_max < 0) throw NoiseSpecError("k_max must be >= 0");
    if (!(q > 2.5)) {
        std::ostringstream os;
        os << "decay exponent q = " << q << " must exceed 5/2 for sum lambda_k^2 k^4 to converge";
        throw NoiseSpecError(os.str());
    }
    if (!std::isfinite(amplitude)) throw NoiseSpecError("non-finite amplitude");
    NoiseSpec s;
    s.k_max = k_max;
    s.decay_exponent = q;
    s.amplitude = amplitude;
    for (int k = -k_max; k <= k_max; ++k) {
        s.lambda[k] = k == 0 ? amplitude : amplitude * std::pow(std::abs(k), -q);
    }
    return s;
}

NoiseSpec explicit_noise(const std::map<int, double>& lambda) {
    NoiseSpec s;
    s.k_max = 0;
    for (const auto& [k, v] : lambda) s.k_max = std::max(s.k_max, std::abs(k));
    s.lambda = lambda;
    s.amplitude = s.lambda_of(0);
    validate_noise_spec(s);
    return s;
}

NoiseSpec zero_noise(int k_max) {
    NoiseSpec s;
    s.k_max = k_max;
    s.amplitude = 0.0;
    return s;
}

void validate_noise_spec(const NoiseSpec& s) {
    if (s.k_max < 0) throw NoiseSpecError("k_max must be >= 0");
    if (s.decay_exponent && !(*s.decay_exponent > 2.5))
        throw NoiseSpecError("decay exponent must exceed 5/2");
    for (const auto& [k, v] : s.lambda) {
        if (std::abs(k) > s.k_max) throw NoiseSpecError("lambda entry beyond k_max");
        if (!std::isfinite(v)) throw NoiseSpecError("non-finite lambda entry");
        if (s.lambda_of(-k) != v) {
            std::ostringstream os;
            os << "lambda must be symmetric: lambda_" << k << " = " << v << ", lambda_" << -k
               << " = " << s.lambda_of(-k);
            throw NoiseSpecError(os.str());
        }
    }
}

double basis_e(int k, double x) {
    if (k == 0) return 1.0;
    if (k > 0) return std::numbers::sqrt2 * std::cos(kTwoPi * k * x);
    return std::numbers::sqrt2 * std::sin(kTwoPi * k * x);
}

NoiseField::NoiseField(const NoiseSpec& spec, int m) : m_(m), k_max_(spec.k_max) {
    validate_noise_spec(spec);
    if (m < 4 * spec.k_max || m < 1) {
        std::ostringstream os;
        os << "grid size m = " << m << " cannot resolve k_max = " << spec.k_max
           << " (need m >= 4 k_max)";
        throw ResolutionError(os.str());
    }
    const int K = modes();
    lambda_.resize(K);
    for (auto& d : data_) d.assign(static_cast<std::size_t>(K) * m, 0.0);
    sigma_sq_sum_.assign(m, 0.0);
    zero_ = true;
    for (int row = 0; row < K; ++row) {
        const int k = mode_k(row);
        lambda_[row] = spec.lambda_of(k);
        if (lambda_[row] != 0.0) zero_ = false;
        for (int j = 0; j < m; ++j) {
            const double x = static_cast<double>(j) / m;
            data_[0][row * m + j] = lambda_[row] * basis_e(k, x);
        }
    }
    // d^p sigma_k alternates between multiples of sigma_{-k} and sigma_k.
    for (int row = 0; row < K; ++row) {
        const int k = mode_k(row);
        const double w = kTwoPi * k;
        const double* s = sigma(row);
        const double* s_neg = sigma(row_of(-k));
        for (int j = 0; j < m; ++j) {
            data_[1][row * m + j] = w * s_neg[j];
            data_[2][row * m + j] = -w * w * s[j];
            data_[3][row * m + j] = -w * w * w * s_neg[j];
            data_[4][row * m + j] = w * w * w * w * s[j];
        }
        for (int j = 0; j < m; ++j) sigma_sq_sum_[j] += s[j] * s[j];
    }
}

NoiseField build_field(const NoiseSpec& spec, int m) { return NoiseField(spec, m); }

namespace {
// SplitMix64 finalizer, used only to hash the (seed, path, step) counter.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
    return std::mt19937_64(mix(mix(mix(seed) ^ path) ^ step));
}

std::vector<double> sample_increments(const NoiseField& field, double dt, std::mt19937_64& rng) {
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    std::vector<double> out(field.modes());
    for (double& v : out) v = normal(rng);
    return out;
}

CovarianceCheck covariance_check(const NoiseField& field, double t, int n_samples,
                                 std::mt19937_64& rng) {
    if (n_samples < 1000) throw PreconditionError("covariance_check needs at least 1000 samples");
    if (t < 0.0) throw PreconditionError("t must be >= 0");
    const int m = field.m();
    const int K = field.modes();
    std::vector<double> target(static_cast<std::size_t>(m) * m, 0.0);
    for (int row = 0; row < K; ++row) {
        const double* s = field.sigma(row);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) target[i * m + j] += t * s[i] * s[j];
    }
    std::vector<double> sum(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> B(m);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(t);
    for (int n = 0; n < n_samples; ++n) {
        std::fill(B.begin(), B.end(), 0.0);
        for (int row = 0; row < K; ++row) {
            const double beta = sd * normal(rng);
            const double* s = field.sigma(row);
            for (int j = 0; j < m; ++j) B[j] += s[j] * beta;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) sum[i * m + j] += B[i] * B[j];
    }
    // B has known mean zero, so the estimator is the plain second moment with
    // variance (C_ii C_jj + C_ij^2) / N for Gaussian B.
    CovarianceCheck out;
    out.n_samples = n_samples;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double est = sum[i * m + j] / n_samples;
            const double c = target[i * m + j];
            const double dev = std::abs(est - c);
            const double se = std::sqrt((target[i * m + i] * target[j * m + j] + c * c) / n_samples);
            out.max_abs_error = std::max(out.max_abs_error, dev);
            if (dev > 0.0) out.max_se_multiple = std::max(out.max_se_multiple, se > 0.0 ? dev / se : INFINITY);
        }
    }
    return out;
}

NormalityCheck normality_check(const std::vector<double>& x) {
    if (x.size() < 8) throw PreconditionError("normality_check needs at least 8 draws");
    const double N = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= N;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= N;
    m3 /= N;
    m4 /= N;
    NormalityCheck out;
    out.mean = mean;
    out.variance = m2 * N / (N - 1.0);
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    out.jarque_bera = N / 6.0 * (out.skewness * out.skewness + 0.25 * out.excess_kurtosis * out.excess_kurtosis);
    out.rejected = out.jarque_bera > kJarqueBeraCritical;
    return out;
}

}  // namespace stfe
