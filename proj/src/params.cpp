#include "stfe/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stfe/errors.hpp"

namespace stfe {

double nu_quadratic(double n, double nu) {
    return nu * nu + nu * (2.0 - 4.0 * n) + n * (n + 2.0);
}

namespace {

void require_open(const char* name, double v, double lo, double hi) {
    if (!(v > lo && v < hi)) {
        std::ostringstream os;
        os << name << " = " << v << " not in (" << lo << ", " << hi << ")";
        throw RangeViolation(os.str());
    }
}

}  // namespace

ParamSet validate_params(double n, double nu, double delta, double eps) {
    for (double v : {n, nu, delta, eps}) {
        if (!std::isfinite(v)) throw RangeViolation("non-finite parameter");
    }
    require_open("n", n, 2.0, 3.0);
    require_open("nu", nu, 3.0, 4.0);
    require_open("delta", delta, 0.0, 1.0);
    require_open("epsilon", eps, 0.0, 1.0);
    if (!(nu < 6.0 - n)) {
        std::ostringstream os;
        os << "nu < 6 - n violated: nu = " << nu << ", 6 - n = " << 6.0 - n;
        throw FeasibilityViolation(os.str());
    }
    const double q = nu_quadratic(n, nu);
    if (q > 0.0) {
        std::ostringstream os;
        os << "nu^2 + nu(2-4n) + n(n+2) <= 0 violated: value " << q;
        throw FeasibilityViolation(os.str());
    }
    return unchecked_params(n, nu, delta, eps);
}

double select_nu(double n) {
    if (!(n > 2.0 && n < 3.0)) throw RangeViolation("select_nu requires n in (2, 3)");
    const double disc = std::sqrt(3.0 * n * n - 6.0 * n + 1.0);
    const double lo = std::max(3.0, (2.0 * n - 1.0) - disc);
    const double hi = std::min({4.0, 6.0 - n, (2.0 * n - 1.0) + disc});
    return 0.5 * (lo + hi);
}

ParamSet unchecked_params(double n, double nu, double delta, double eps) {
    return ParamSet{n, nu, delta, eps, 0.5 * (nu - n)};
}

}  // namespace stfe
