#pragma once

#include <string>
#include <vector>

namespace stfe {

// Periodic film height on x_j = j h, h = 1/m.
struct GridState {
    std::vector<double> u;
    double h = 0.0;
    double t = 0.0;

    int m() const { return static_cast<int>(u.size()); }
};

// constant:            u = c
// perturbed_constant:  u = c + a sin(2 pi k x)
// bump:                u = c + a exp(-(d(x, center) / width)^2), d periodic distance
struct InitialProfile {
    std::string kind = "perturbed_constant";
    double c = 1.0;
    double a = 0.3;
    int k = 1;
    double center = 0.5;
    double width = 0.1;
};

// Throws ProfileError when the profile is not strictly positive on the grid or
// the kind is unknown.
GridState init_state(const InitialProfile& profile, int m);

// h sum_j u_j
double grid_mass(const GridState& s);

// Periodic difference operators.
// (u_{j+1} - u_j) / h, associated with face j+1/2
std::vector<double> forward_difference(const std::vector<double>& u, double h);
// (u_{j+1} - 2u_j + u_{j-1}) / h^2
std::vector<double> discrete_laplacian(const std::vector<double>& u, double h);
// (u_{j+2} - 3u_{j+1} + 3u_j - u_{j-1}) / h^3, associated with face j+1/2
std::vector<double> third_difference(const std::vector<double>& u, double h);
// (u_{j+1} - u_{j-1}) / (2h)
std::vector<double> centered_derivative(const std::vector<double>& u, double h);

}  // namespace stfe
