#pragma once

#include <span>
#include <vector>

#include "stfe/grid.hpp"
#include "stfe/mobility.hpp"
#include "stfe/noise.hpp"
#include "stfe/solver.hpp"

namespace stfe {

// Instantaneous rates of the energy expansion at one state, with gamma the
// cutoff factor already applied. The noise-induced terms use analytic sigma
// derivatives and the centered difference for du/dx.
struct ItoRates {
    double dissipation = 0.0;  // -h sum_faces M (D+ Lap u)^2
    double production = 0.0;   // (1/2) sum_k sigma_k^2 (F'')^2 (u_x)^4
    double cubic = 0.0;        // (1/16) sum_k (sigma_k^2)' ((F^2)''' + 4((F')^2)') (u_x)^3
    double quadratic_a = 0.0;  // (3/2) sum_k ((sigma_k')^2 - sigma_k sigma_k'') (F')^2 (u_x)^2
    double quadratic_b = 0.0;  // (3/16) sum_k (sigma_k^2)'' (F^2)'' (u_x)^2
    double zeroth = 0.0;       // (1/8) sum_k (4 sigma_k sigma_k'''' - (sigma_k^2)'''') F^2
    // Discrete forms before integration by parts, which close the scheme's
    // energy balance: h sum D+u D+(correction drift) and
    // (1/2) sum_k h sum (D+ D1[sigma_k F])^2.
    double ito_correction = 0.0;
    double quadratic_variation = 0.0;

    double noise_terms() const { return production + cubic + quadratic_a + quadratic_b + zeroth; }
};

ItoRates ito_rates(const GridState& s, const Mobility& F, const NoiseField& field, double R);

// Discrete stochastic term gamma h sum_j q_j (D1 Lap u)_j with
// q = F(u) sum_k sigma_k dbeta_k; equals h sum D+u D+(gamma noise increment).
double stochastic_increment(const GridState& s, const Mobility& F, const NoiseField& field,
                            double R, std::span<const double> dbeta);

// Cumulative values from t = 0, sampled at the trajectory's report steps.
struct ItoLedger {
    std::vector<double> t;
    std::vector<double> lhs;  // E(t) - E(0)
    std::vector<double> dissipation, production, cubic, quadratic_a, quadratic_b, zeroth;
    std::vector<double> stochastic;
    std::vector<double> ito_correction, quadratic_variation;
    // (ito_correction + quadratic_variation) - (sum of the five noise terms);
    // vanishes as h -> 0.
    std::vector<double> ibp_defect;
    // lhs - (dissipation + ito_correction + quadratic_variation + stochastic);
    // left-endpoint time integration.
    std::vector<double> residual;
};

// Replays the trajectory from its stored increments and accumulates the terms.
// Throws MissingIncrements when the trajectory kept none.
ItoLedger ito_ledger(const Trajectory& tr, const NoiseField& field);

}  // namespace stfe
