#include "stfe/ito_ledger.hpp"

#include <cmath>

#include "stfe/errors.hpp"
#include "stfe/functionals.hpp"
#include "stfe/kernels.hpp"

namespace stfe {

ItoRates ito_rates(const GridState& s, const Mobility& F, const NoiseField& field, double R) {
    const int m = s.m();
    if (field.m() != m) throw GridMismatch("noise field grid differs from state grid");
    const double h = s.h;
    std::vector<Jet> jet(m);
    std::vector<double> f(m), df(m), M(m);
    for (int j = 0; j < m; ++j) {
        jet[j] = F(s.u[j]);
        f[j] = jet[j].f;
        df[j] = jet[j].d1;
    }
    serial::face_mobility(f, M);
    const auto d3 = third_difference(s.u, s.h);
    const auto ux = centered_derivative(s.u, s.h);
    const auto dplus = forward_difference(s.u, s.h);

    ItoRates r;
    for (int j = 0; j < m; ++j) r.dissipation -= M[j] * d3[j] * d3[j];
    r.dissipation *= h;
    if (field.is_zero()) return r;

    const double gamma = cutoff_factor(s, R);
    const double g2 = gamma * gamma;
    if (g2 == 0.0) return r;

    std::vector<double> corr(m);
    serial::stratonovich_correction(f, df, field, h, corr);
    const auto dcorr = forward_difference(corr, h);
    for (int j = 0; j < m; ++j) r.ito_correction += dplus[j] * dcorr[j];
    r.ito_correction *= g2 * h;

    // Mode-independent factors per grid point.
    std::vector<double> w_prod(m), w_cubic(m), w_qa(m), w_qb(m), w_zero(m);
    for (int j = 0; j < m; ++j) {
        const Jet& J = jet[j];
        const Jet F2 = square(J);
        const Jet dF2 = square_of_derivative(J);
        const double u1 = ux[j], u2 = u1 * u1;
        w_prod[j] = 0.5 * J.d2 * J.d2 * u2 * u2;
        w_cubic[j] = (F2.d3 + 4.0 * dF2.d1) * u2 * u1 / 16.0;
        w_qa[j] = 1.5 * J.d1 * J.d1 * u2;
        w_qb[j] = 3.0 / 16.0 * F2.d2 * u2;
        w_zero[j] = F2.f / 8.0;
    }
    std::vector<double> a(m), N(m);
    for (int row = 0; row < field.modes(); ++row) {
        if (field.lambda(row) == 0.0) continue;
        const double* s0 = field.sigma(row, 0);
        const double* s1 = field.sigma(row, 1);
        const double* s2 = field.sigma(row, 2);
        const double* s3 = field.sigma(row, 3);
        const double* s4 = field.sigma(row, 4);
        for (int j = 0; j < m; ++j) {
            const double sq = s0[j] * s0[j];
            const double sq1 = 2.0 * s0[j] * s1[j];
            const double sq2 = 2.0 * (s1[j] * s1[j] + s0[j] * s2[j]);
            const double sq4 = 2.0 * (s0[j] * s4[j] + 4.0 * s1[j] * s3[j] + 3.0 * s2[j] * s2[j]);
            r.production += sq * w_prod[j];
            r.cubic += sq1 * w_cubic[j];
            r.quadratic_a += (s1[j] * s1[j] - s0[j] * s2[j]) * w_qa[j];
            r.quadratic_b += sq2 * w_qb[j];
            r.zeroth += (4.0 * s0[j] * s4[j] - sq4) * w_zero[j];
            a[j] = s0[j] * f[j];
        }
        serial::centered_difference(a, h, N);
        double qv = 0.0;
        for (int j = 0; j < m; ++j) {
            const double d = (N[j + 1 == m ? 0 : j + 1] - N[j]) / h;
            qv += d * d;
        }
        r.quadratic_variation += 0.5 * h * qv;
    }
    r.quadratic_variation *= g2;
    for (double* v : {&r.production, &r.cubic, &r.quadratic_a, &r.quadratic_b, &r.zeroth}) *v *= g2 * h;
    return r;
}

double stochastic_increment(const GridState& s, const Mobility& F, const NoiseField& field,
                            double R, std::span<const double> dbeta) {
    const int m = s.m();
    if (field.m() != m) throw GridMismatch("noise field grid differs from state grid");
    if (static_cast<int>(dbeta.size()) != field.modes())
        throw GridMismatch("increment count differs from mode count");
    if (field.is_zero()) return 0.0;
    const double gamma = cutoff_factor(s, R);
    const auto d1lap = centered_derivative(discrete_laplacian(s.u, s.h), s.h);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        double w = 0.0;
        for (int row = 0; row < field.modes(); ++row) w += field.sigma(row)[j] * dbeta[row];
        acc += F(s.u[j]).f * w * d1lap[j];
    }
    return gamma * s.h * acc;
}

ItoLedger ito_ledger(const Trajectory& tr, const NoiseField& field) {
    if (tr.steps > 0 && static_cast<long>(tr.increments.size()) != tr.steps)
        throw MissingIncrements("trajectory does not retain its noise increments");
    const SimConfig& cfg = tr.config;
    const Mobility F(cfg.mobility, cfg.params);
    Stepper stepper(cfg, field);
    GridState s = initial_state(cfg);
    const double E0 = energy(s);
    const double dt = tr.dt;

    ItoLedger L;
    double c[10] = {0};  // dissipation .. quadratic_variation, stochastic
    std::size_t next = 0;
    auto record = [&](long i) {
        if (next >= tr.report_steps.size() || tr.report_steps[next] != i) return;
        ++next;
        L.t.push_back(i * dt);
        L.lhs.push_back(energy(s) - E0);
        L.dissipation.push_back(c[0]);
        L.production.push_back(c[1]);
        L.cubic.push_back(c[2]);
        L.quadratic_a.push_back(c[3]);
        L.quadratic_b.push_back(c[4]);
        L.zeroth.push_back(c[5]);
        L.ito_correction.push_back(c[6]);
        L.quadratic_variation.push_back(c[7]);
        L.stochastic.push_back(c[8]);
        L.ibp_defect.push_back(c[6] + c[7] - (c[1] + c[2] + c[3] + c[4] + c[5]));
        L.residual.push_back(L.lhs.back() - (c[0] + c[6] + c[7] + c[8]));
    };
    record(0);
    for (long i = 0; i < tr.steps; ++i) {
        const auto& db = tr.increments[i];
        const ItoRates r = ito_rates(s, F, field, cfg.R);
        c[0] += dt * r.dissipation;
        c[1] += dt * r.production;
        c[2] += dt * r.cubic;
        c[3] += dt * r.quadratic_a;
        c[4] += dt * r.quadratic_b;
        c[5] += dt * r.zeroth;
        c[6] += dt * r.ito_correction;
        c[7] += dt * r.quadratic_variation;
        c[8] += stochastic_increment(s, F, field, cfg.R, db);
        s = stepper.step(s, dt, db);
        s.t = (i + 1) * dt;
        record(i + 1);
    }
    return L;
}

}  // namespace stfe
