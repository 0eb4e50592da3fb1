#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stfe/params.hpp"
#include "stfe/regularized_functionals.hpp"

namespace stfe {

// Arguments a bound is stated for.
enum class BoundDomain {
    Positive,        // r > 0
    AtLeastDelta,    // r >= delta
    BelowDelta,      // 0 < r < delta
    Negative,        // r < 0
    All,             // every real r
    NonNegativeKge,  // r >= 0 and K_eps(r) >= delta
    Scalar,          // no argument; evaluated once per parameter set
};

std::string to_string(BoundDomain d);
bool in_domain(BoundDomain d, double r, const ParamSet& p);

enum UniformIn : std::uint8_t { kUniformNone = 0, kUniformDelta = 1, kUniformEps = 2 };

// One evaluation point. When `table` is set, r is its node `index` and the
// functionals are read from it; otherwise they are computed pointwise.
struct BoundPoint {
    double r = 0.0;
    const ParamSet* p = nullptr;
    const FunctionalTable* table = nullptr;
    std::size_t index = 0;
};

using BoundExpr = double (*)(const BoundPoint&);

struct BoundSpec {
    int id = 0;  // equation number
    std::string statement;
    BoundDomain domain = BoundDomain::All;
    BoundExpr lhs = nullptr;
    BoundExpr rhs = nullptr;
    std::uint8_t uniform_in = kUniformNone;
    std::optional<double> exact_constant;
    bool needs_functionals = false;
};

// Registry in its fixed enumeration order.
const std::vector<BoundSpec>& bound_registry();
const BoundSpec& bound_spec(int id);
std::vector<int> registry_ids();

// lhs and rhs at one argument; throws ExpressionDomainError outside the domain.
struct BoundValue {
    double lhs = 0.0;
    double rhs = 0.0;
};
BoundValue evaluate_bound(const BoundSpec& spec, double r, const ParamSet& p);

struct ScanGrid {
    std::vector<ParamSet> params;  // base parameter sets
    double r_min = 1e-4;
    double r_max = 1e4;
    int per_decade = 400;
    // Sweep applied to each base set for the uniformity spread.
    std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
    std::vector<double> epsilons{0.1, 0.01};
    double spread_threshold = 2.0;
    double exact_slack = 1e-6;
    FunctionalTolerance tol{};
};

ScanGrid default_scan_grid();

// Sorted signed arguments for one parameter set: +-log grid, 0, +-delta, +-eps, +-1.
std::vector<double> scan_arguments(const ScanGrid& grid, const ParamSet& p);

// max_ratio and its witness range over the base parameter sets; the sweep
// fields include the uniformity sweep as well. pass requires a finite
// max_ratio and, with an exact constant, max_ratio <= constant + slack.
// uniform records uniformity_spread <= spread_threshold separately.
struct BoundReport {
    int id = 0;
    double max_ratio = 0.0;
    double witness_r = 0.0;
    ParamSet witness_params{};
    double sweep_max_ratio = 0.0;
    double sweep_witness_r = 0.0;
    ParamSet sweep_witness_params{};
    double uniformity_spread = 1.0;
    long points = 0;
    bool pass = false;
    bool uniform = true;
    std::string message;
};

BoundReport check_bound(const BoundSpec& spec, const ScanGrid& grid);

// One report per registered bound, in registry order. Throws PreconditionError
// when grid.params is empty. Bounds are checked in parallel.
std::vector<BoundReport> check_all(const ScanGrid& grid);
// Same with a caller-supplied registry (used to check the checker).
std::vector<BoundReport> check_all(const std::vector<BoundSpec>& specs, const ScanGrid& grid);

// n^2 r^nu + delta^{2l} nu^2 r^n against the right-hand polynomial; also fails
// when that polynomial is not strictly positive on the grid.
BoundReport check_eq56_pointwise(const ParamSet& p, const std::vector<double>& r);
double product_bound_lhs(double r, const ParamSet& p);
double product_bound_rhs(double r, const ParamSet& p);

// Whole-line integral of (F_de'')^2 against twice the half-line integral.
struct SecondDerivativeSplit {
    double whole_line = 0.0;
    double twice_half_line = 0.0;
    double rel_difference = 0.0;
    bool pass = false;
};
SecondDerivativeSplit check_second_derivative_split(const ParamSet& p, const FunctionalTolerance& tol = {});

}  // namespace stfe
