#include "stfe/kernels.hpp"

#include <vector>

#include "stfe/errors.hpp"

namespace stfe {

namespace {

inline int wrap(int j, int m) { return j < 0 ? j + m : (j >= m ? j - m : j); }

void require_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw GridMismatch("grid vectors differ in length");
}

void require_field(const NoiseField& field, std::size_t m, std::size_t nb) {
    if (static_cast<std::size_t>(field.m()) != m) throw GridMismatch("noise field grid differs from state grid");
    if (nb != static_cast<std::size_t>(field.modes())) throw GridMismatch("increment count differs from mode count");
}

// Per-entry formulas shared by both variants.
inline double face_entry(std::span<const double> f, int j, int m) {
    const double a = f[j], b = f[wrap(j + 1, m)];
    return 0.5 * (a * a + b * b);
}

inline double flux_entry(std::span<const double> u, std::span<const double> M, int j, int m,
                         double inv_h3) {
    return M[j] * (u[wrap(j + 2, m)] - 3.0 * u[wrap(j + 1, m)] + 3.0 * u[j] - u[wrap(j - 1, m)]) *
           inv_h3;
}

inline double drift_entry(std::span<const double> u, std::span<const double> M, int j, int m,
                          double inv_h3, double inv_h) {
    return -(flux_entry(u, M, j, m, inv_h3) - flux_entry(u, M, wrap(j - 1, m), m, inv_h3)) * inv_h;
}

inline double weighted_sigma(const NoiseField& field, std::span<const double> dbeta, int j) {
    double s = 0.0;
    for (int row = 0; row < field.modes(); ++row) s += field.sigma(row)[j] * dbeta[row];
    return s;
}

// c_kj = sigma_kj f'_j D1(sigma_k f)_j, stored row-major by mode.
inline void correction_inner(std::span<const double> f, std::span<const double> df,
                             const NoiseField& field, double inv_2h, int row, int j,
                             std::vector<double>& c) {
    const int m = field.m();
    const double* s = field.sigma(row);
    const int jp = wrap(j + 1, m), jm = wrap(j - 1, m);
    const double b = (s[jp] * f[jp] - s[jm] * f[jm]) * inv_2h;
    c[static_cast<std::size_t>(row) * m + j] = s[j] * df[j] * b;
}

inline double correction_outer(const NoiseField& field, const std::vector<double>& c, int j,
                               double inv_2h) {
    const int m = field.m();
    const int jp = wrap(j + 1, m), jm = wrap(j - 1, m);
    double acc = 0.0;
    for (int row = 0; row < field.modes(); ++row) {
        const double* cr = c.data() + static_cast<std::size_t>(row) * m;
        acc += (cr[jp] - cr[jm]) * inv_2h;
    }
    return 0.5 * acc;
}

}  // namespace

namespace serial {

void evaluate_mobility(const Mobility& F, std::span<const double> u, std::span<double> f,
                       std::span<double> df) {
    require_sizes(u.size(), f.size());
    require_sizes(u.size(), df.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const Jet v = F(u[j]);
        f[j] = v.f;
        df[j] = v.d1;
    }
}

void face_mobility(std::span<const double> f, std::span<double> M) {
    require_sizes(f.size(), M.size());
    const int m = static_cast<int>(f.size());
    for (int j = 0; j < m; ++j) M[j] = face_entry(f, j, m);
}

void centered_difference(std::span<const double> v, double h, std::span<double> out) {
    require_sizes(v.size(), out.size());
    const int m = static_cast<int>(v.size());
    const double inv_2h = 0.5 / h;
    for (int j = 0; j < m; ++j) out[j] = (v[wrap(j + 1, m)] - v[wrap(j - 1, m)]) * inv_2h;
}

void flux_drift(std::span<const double> u, std::span<const double> M, double h,
                std::span<double> out) {
    require_sizes(u.size(), M.size());
    require_sizes(u.size(), out.size());
    const int m = static_cast<int>(u.size());
    const double inv_h = 1.0 / h, inv_h3 = inv_h * inv_h * inv_h;
    for (int j = 0; j < m; ++j) out[j] = drift_entry(u, M, j, m, inv_h3, inv_h);
}

void noise_divergence(std::span<const double> f, const NoiseField& field,
                      std::span<const double> dbeta, double h, std::span<double> out) {
    require_field(field, f.size(), dbeta.size());
    require_sizes(f.size(), out.size());
    const int m = static_cast<int>(f.size());
    std::vector<double> w(m);
    for (int j = 0; j < m; ++j) w[j] = weighted_sigma(field, dbeta, j) * f[j];
    centered_difference(w, h, out);
}

void stratonovich_correction(std::span<const double> f, std::span<const double> df,
                             const NoiseField& field, double h, std::span<double> out) {
    require_field(field, f.size(), static_cast<std::size_t>(field.modes()));
    require_sizes(f.size(), df.size());
    require_sizes(f.size(), out.size());
    const int m = static_cast<int>(f.size());
    const double inv_2h = 0.5 / h;
    std::vector<double> c(static_cast<std::size_t>(field.modes()) * m);
    for (int row = 0; row < field.modes(); ++row)
        for (int j = 0; j < m; ++j) correction_inner(f, df, field, inv_2h, row, j, c);
    for (int j = 0; j < m; ++j) out[j] = correction_outer(field, c, j, inv_2h);
}

}  // namespace serial

namespace omp {

void evaluate_mobility(const Mobility& F, std::span<const double> u, std::span<double> f,
                       std::span<double> df) {
    require_sizes(u.size(), f.size());
    require_sizes(u.size(), df.size());
    const long m = static_cast<long>(u.size());
#pragma omp parallel for schedule(static)
    for (long j = 0; j < m; ++j) {
        const Jet v = F(u[j]);
        f[j] = v.f;
        df[j] = v.d1;
    }
}

void face_mobility(std::span<const double> f, std::span<double> M) {
    require_sizes(f.size(), M.size());
    const int m = static_cast<int>(f.size());
#pragma omp parallel for schedule(static)
    for (int j = 0; j < m; ++j) M[j] = face_entry(f, j, m);
}

void centered_difference(std::span<const double> v, double h, std::span<double> out) {
    require_sizes(v.size(), out.size());
    const int m = static_cast<int>(v.size());
    const double inv_2h = 0.5 / h;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < m; ++j) out[j] = (v[wrap(j + 1, m)] - v[wrap(j - 1, m)]) * inv_2h;
}

void flux_drift(std::span<const double> u, std::span<const double> M, double h,
                std::span<double> out) {
    require_sizes(u.size(), M.size());
    require_sizes(u.size(), out.size());
    const int m = static_cast<int>(u.size());
    const double inv_h = 1.0 / h, inv_h3 = inv_h * inv_h * inv_h;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < m; ++j) out[j] = drift_entry(u, M, j, m, inv_h3, inv_h);
}

void noise_divergence(std::span<const double> f, const NoiseField& field,
                      std::span<const double> dbeta, double h, std::span<double> out) {
    require_field(field, f.size(), dbeta.size());
    require_sizes(f.size(), out.size());
    const int m = static_cast<int>(f.size());
    std::vector<double> w(m);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < m; ++j) w[j] = weighted_sigma(field, dbeta, j) * f[j];
    centered_difference(w, h, out);
}

void stratonovich_correction(std::span<const double> f, std::span<const double> df,
                             const NoiseField& field, double h, std::span<double> out) {
    require_field(field, f.size(), static_cast<std::size_t>(field.modes()));
    require_sizes(f.size(), df.size());
    require_sizes(f.size(), out.size());
    const int m = static_cast<int>(f.size());
    const int K = field.modes();
    const double inv_2h = 0.5 / h;
    std::vector<double> c(static_cast<std::size_t>(K) * m);
#pragma omp parallel
    {
#pragma omp for collapse(2) schedule(static)
        for (int row = 0; row < K; ++row)
            for (int j = 0; j < m; ++j) correction_inner(f, df, field, inv_2h, row, j, c);
#pragma omp for schedule(static)
        for (int j = 0; j < m; ++j) out[j] = correction_outer(field, c, j, inv_2h);
    }
}

}  // namespace omp

}  // namespace stfe
