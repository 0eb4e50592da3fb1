#pragma once

namespace stfe {

// Exponents and regularization levels shared by every mobility evaluation.
struct ParamSet {
    double n = 2.5;
    double nu = 3.25;
    double delta = 0.1;
    double eps = 0.01;
    double l = 0.375;  // (nu - n) / 2
};

// Left side of the quadratic feasibility condition; must be <= 0.
double nu_quadratic(double n, double nu);

// Throws RangeViolation or FeasibilityViolation naming the first failed condition.
ParamSet validate_params(double n, double nu, double delta, double eps);

// Midpoint of the feasible nu-interval for the given n.
double select_nu(double n);

// Builds a ParamSet without any checks. Only for tests that need infeasible sets.
ParamSet unchecked_params(double n, double nu, double delta, double eps);

}  // namespace stfe
