#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "stfe/errors.hpp"
#include "stfe/kernels.hpp"
#include "stfe/mobility.hpp"
#include "stfe/noise.hpp"

using namespace stfe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("basis values") {
    CHECK(basis_e(0, 0.37) == 1.0);
    CHECK_THAT(basis_e(1, 0.0), WithinRel(std::sqrt(2.0), 1e-15));
    // k <= -1 uses sin(2 pi k x) with k negative.
    CHECK_THAT(basis_e(-1, 0.25), WithinRel(-std::sqrt(2.0), 1e-15));
    CHECK_THAT(basis_e(-2, 0.125), WithinRel(-std::sqrt(2.0), 1e-15));
    CHECK_THAT(basis_e(3, 0.1), WithinRel(std::sqrt(2.0) * std::cos(2 * M_PI * 0.3), 1e-14));
}

TEST_CASE("discrete orthonormality of resolved modes") {
    const int m = 32;
    for (int k = -15; k <= 15; ++k)
        for (int l = -15; l <= 15; ++l) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += basis_e(k, double(j) / m) * basis_e(l, double(j) / m);
            CHECK_THAT(s / m, WithinAbs(k == l ? 1.0 : 0.0, 1e-13));
        }
}

TEST_CASE("noise spec construction") {
    CHECK_THROWS_AS(decay_noise(8, 2.0, 0.5), NoiseSpecError);
    CHECK_THROWS_AS(decay_noise(8, 2.5, 0.5), NoiseSpecError);
    CHECK_NOTHROW(decay_noise(8, 2.51, 0.5));
    const NoiseSpec s = decay_noise(8, 3.0, 0.5);
    CHECK(s.lambda_of(0) == 0.5);
    CHECK_THAT(s.lambda_of(-2), WithinRel(0.5 / 8.0, 1e-15));
    CHECK_THROWS_AS(explicit_noise({{1, 0.2}, {-1, 0.3}}), NoiseSpecError);
    CHECK_NOTHROW(explicit_noise({{1, 0.2}, {-1, 0.2}}));
}

TEST_CASE("field resolution and constant mode") {
    CHECK_THROWS_AS(NoiseField(decay_noise(8, 3.0, 0.5), 16), ResolutionError);
    const NoiseField f(explicit_noise({{0, 1.0}}), 16);
    for (int j = 0; j < 16; ++j) {
        CHECK(f.sigma(0)[j] == 1.0);
        CHECK(f.sigma(0, 1)[j] == 0.0);
    }
    CHECK(NoiseField(zero_noise(), 16).is_zero());
}

TEST_CASE("stored derivatives: identity 2 pi k sigma_{-k} and the analytic forms") {
    const NoiseField f(decay_noise(8, 3.0, 1.0), 64);
    for (int row = 0; row < f.modes(); ++row) {
        const int k = f.mode_k(row);
        const double lam = f.lambda(row);
        for (int j = 0; j < 64; ++j) {
            const double x = j / 64.0, w = 2 * M_PI * k;
            CHECK(f.sigma(row, 1)[j] == w * f.sigma(f.row_of(-k))[j]);
            double d1, d4;
            if (k > 0) {
                d1 = -lam * std::sqrt(2.0) * w * std::sin(w * x);
                d4 = lam * std::sqrt(2.0) * std::pow(w, 4) * std::cos(w * x);
            } else if (k < 0) {
                d1 = lam * std::sqrt(2.0) * w * std::cos(w * x);
                d4 = lam * std::sqrt(2.0) * std::pow(w, 4) * std::sin(w * x);
            } else {
                d1 = d4 = 0.0;
            }
            CHECK_THAT(f.sigma(row, 1)[j], WithinAbs(d1, 1e-12 * (1 + std::abs(w))));
            CHECK_THAT(f.sigma(row, 4)[j], WithinAbs(d4, 1e-12 * (1 + std::pow(w, 4))));
        }
    }
}

TEST_CASE("increments: moments, determinism and normality") {
    const NoiseField f(explicit_noise({{0, 1.0}}), 8);
    const double dt = 0.01;
    const int N = 100000;
    std::vector<double> x(N);
    for (int i = 0; i < N; ++i) {
        auto rng = make_rng(5, 0, i);
        x[i] = sample_increments(f, dt, rng)[0];
    }
    double mean = 0, var = 0;
    for (double v : x) mean += v;
    mean /= N;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= N - 1;
    CHECK(std::abs(mean) <= 4 * std::sqrt(dt / N));
    CHECK_THAT(var, WithinRel(dt, 0.05));
    CHECK_FALSE(normality_check(x).rejected);

    auto a = make_rng(1, 2, 3), b = make_rng(1, 2, 3), c = make_rng(1, 2, 4);
    const auto va = sample_increments(f, dt, a);
    CHECK(va == sample_increments(f, dt, b));
    CHECK(va != sample_increments(f, dt, c));
}

TEST_CASE("normality check rejects a uniform sample") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> x(100000);
    for (double& v : x) v = U(g);
    CHECK(normality_check(x).rejected);
}

TEST_CASE("covariance check") {
    std::mt19937_64 rng(17);
    const NoiseField one(explicit_noise({{0, 1.0}}), 8);
    const auto c0 = covariance_check(one, 2.0, 4000, rng);
    CHECK(c0.max_se_multiple <= 5.0);
    const auto zero_t = covariance_check(one, 0.0, 1000, rng);
    CHECK(zero_t.max_abs_error == 0.0);
    const NoiseField f(decay_noise(8, 3.0, 0.5), 32);
    CHECK(covariance_check(f, 1.0, 4000, rng).max_se_multiple <= 5.0);
    CHECK_THROWS_AS(covariance_check(f, 1.0, 10, rng), PreconditionError);
}

TEST_CASE("noise divergence and Stratonovich correction") {
    const ParamSet p = validate_params(2.5, 3.25, 0.1, 0.01);
    const Mobility F(MobilityKind::Fde, p);
    const int m = 64;
    const double h = 1.0 / m;

    SECTION("constant state with the constant mode gives zero") {
        const NoiseField f(explicit_noise({{0, 0.7}}), m);
        std::vector<double> u(m, 1.3), fv(m), df(m), out(m);
        serial::evaluate_mobility(F, u, fv, df);
        serial::noise_divergence(fv, f, std::vector<double>{0.3}, h, out);
        for (double v : out) CHECK(v == 0.0);
        serial::stratonovich_correction(fv, df, f, h, out);
        for (double v : out) CHECK(v == 0.0);
    }
    SECTION("single mode k = 1 on u = 1") {
        const NoiseField f(explicit_noise({{1, 0.4}, {-1, 0.4}}), m);
        std::vector<double> u(m, 1.0), fv(m), df(m), out(m);
        serial::evaluate_mobility(F, u, fv, df);
        std::vector<double> db(f.modes(), 0.0);
        db[f.row_of(1)] = 0.05;
        serial::noise_divergence(fv, f, db, h, out);
        const double F1 = Fde(1.0, p).f;
        for (int j = 0; j < m; ++j) {
            // Centered difference of 0.4 sqrt2 cos(2 pi x): symbol sin(2 pi h)/h.
            const double x = j * h;
            const double hand = -F1 * 0.4 * std::sqrt(2.0) * std::sin(2 * M_PI * x) * std::sin(2 * M_PI * h) / h * 0.05;
            CHECK_THAT(out[j], WithinAbs(hand, 1e-12));
        }
    }
    SECTION("identity mobility with a constant mode reduces to (1/2) sigma^2 D1 D1 u") {
        const NoiseField f(explicit_noise({{0, 0.6}}), m);
        const Mobility id(MobilityKind::Identity, p);
        std::mt19937_64 g(4);
        std::uniform_real_distribution<double> U(0.5, 1.5);
        std::vector<double> u(m), fv(m), df(m), out(m);
        for (double& v : u) v = U(g);
        serial::evaluate_mobility(id, u, fv, df);
        serial::stratonovich_correction(fv, df, f, h, out);
        for (int j = 0; j < m; ++j) {
            const int jm2 = (j + m - 2) % m, jp2 = (j + 2) % m;
            const double d1d1 = (u[jp2] - 2 * u[j] + u[jm2]) / (4 * h * h);
            CHECK_THAT(out[j], WithinAbs(0.5 * 0.36 * d1d1, 1e-9));
        }
    }
    SECTION("divergence form: both sum to zero, serial and omp agree bit for bit") {
        const NoiseField f(decay_noise(8, 3.0, 0.5), m);
        std::mt19937_64 g(9);
        std::uniform_real_distribution<double> U(-1.0, 2.0);
        std::vector<double> u(m), fv(m), df(m), a(m), b(m), db(f.modes());
        for (double& v : u) v = U(g);
        for (double& v : db) v = U(g) * 0.1;
        serial::evaluate_mobility(F, u, fv, df);
        serial::noise_divergence(fv, f, db, h, a);
        omp::noise_divergence(fv, f, db, h, b);
        CHECK(a == b);
        double s = 0, scale = 0;
        for (double v : a) { s += v; scale += std::abs(v); }
        CHECK(std::abs(s) <= 1e-13 * std::max(scale, 1.0));
        serial::stratonovich_correction(fv, df, f, h, a);
        omp::stratonovich_correction(fv, df, f, h, b);
        CHECK(a == b);
        s = scale = 0;
        for (double v : a) { s += v; scale += std::abs(v); }
        CHECK(std::abs(s) <= 1e-13 * std::max(scale, 1.0));
    }
    SECTION("grid mismatch") {
        const NoiseField f(decay_noise(2, 3.0, 0.5), 32);
        std::vector<double> fv(m, 1.0), out(m), db(f.modes());
        CHECK_THROWS_AS(serial::noise_divergence(fv, f, db, h, out), GridMismatch);
    }
}
