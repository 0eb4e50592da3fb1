#include "stfe/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stfe/errors.hpp"

namespace stfe {

namespace {
inline int wrap(int j, int m) { return ((j % m) + m) % m; }
}  // namespace

GridState init_state(const InitialProfile& p, int m) {
    if (m < 1) throw ProfileError("grid size must be positive");
    GridState s;
    s.h = 1.0 / m;
    s.u.resize(m);
    for (int j = 0; j < m; ++j) {
        const double x = j * s.h;
        double v;
        if (p.kind == "constant") {
            v = p.c;
        } else if (p.kind == "perturbed_constant") {
            v = p.c + p.a * std::sin(2.0 * std::numbers::pi * p.k * x);
        } else if (p.kind == "bump") {
            double d = std::abs(x - p.center);
            d = std::min(d, 1.0 - d);
            if (!(p.width > 0.0)) throw ProfileError("bump width must be positive");
            v = p.c + p.a * std::exp(-(d / p.width) * (d / p.width));
        } else {
            throw ProfileError("unknown profile '" + p.kind + "'");
        }
        if (!(v > 0.0)) {
            std::ostringstream os;
            os << "profile '" << p.kind << "' is not positive: u(" << x << ") = " << v;
            throw ProfileError(os.str());
        }
        s.u[j] = v;
    }
    return s;
}

double grid_mass(const GridState& s) {
    double sum = 0.0;
    for (double v : s.u) sum += v;
    return s.h * sum;
}

std::vector<double> forward_difference(const std::vector<double>& u, double h) {
    const int m = static_cast<int>(u.size());
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) out[j] = (u[wrap(j + 1, m)] - u[j]) / h;
    return out;
}

std::vector<double> discrete_laplacian(const std::vector<double>& u, double h) {
    const int m = static_cast<int>(u.size());
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) out[j] = (u[wrap(j + 1, m)] - 2.0 * u[j] + u[wrap(j - 1, m)]) / (h * h);
    return out;
}

std::vector<double> third_difference(const std::vector<double>& u, double h) {
    const int m = static_cast<int>(u.size());
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j)
        out[j] = (u[wrap(j + 2, m)] - 3.0 * u[wrap(j + 1, m)] + 3.0 * u[j] - u[wrap(j - 1, m)]) / (h * h * h);
    return out;
}

std::vector<double> centered_derivative(const std::vector<double>& u, double h) {
    const int m = static_cast<int>(u.size());
    std::vector<double> out(m);
    for (int j = 0; j < m; ++j) out[j] = (u[wrap(j + 1, m)] - u[wrap(j - 1, m)]) / (2.0 * h);
    return out;
}

}  // namespace stfe
