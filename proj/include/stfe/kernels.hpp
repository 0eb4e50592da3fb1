#pragma once

#include <span>

#include "stfe/mobility.hpp"
#include "stfe/noise.hpp"

// Periodic grid stencils in flux form. The serial namespace is the reference;
// the omp namespace distributes grid points over threads and performs the same
// floating-point operations per output entry, so both agree bit for bit.
//
// Conventions on a grid of m points with width h:
//   D1 v_j    = (v_{j+1} - v_{j-1}) / (2h)
//   face j+1/2 mobility M = (F^2(u_j) + F^2(u_{j+1})) / 2
//   face flux Phi = M (u_{j+2} - 3u_{j+1} + 3u_j - u_{j-1}) / h^3
//   drift_j   = -(Phi_{j+1/2} - Phi_{j-1/2}) / h
namespace stfe {

namespace serial {

void evaluate_mobility(const Mobility& F, std::span<const double> u, std::span<double> f,
                       std::span<double> df);
void face_mobility(std::span<const double> f, std::span<double> M);
void centered_difference(std::span<const double> v, double h, std::span<double> out);
void flux_drift(std::span<const double> u, std::span<const double> M, double h,
                std::span<double> out);
// sum_k D1[sigma_k f] dbeta_k
void noise_divergence(std::span<const double> f, const NoiseField& field,
                      std::span<const double> dbeta, double h, std::span<double> out);
// (1/2) sum_k D1[sigma_k f' D1(sigma_k f)]
void stratonovich_correction(std::span<const double> f, std::span<const double> df,
                             const NoiseField& field, double h, std::span<double> out);

}  // namespace serial

namespace omp {

void evaluate_mobility(const Mobility& F, std::span<const double> u, std::span<double> f,
                       std::span<double> df);
void face_mobility(std::span<const double> f, std::span<double> M);
void centered_difference(std::span<const double> v, double h, std::span<double> out);
void flux_drift(std::span<const double> u, std::span<const double> M, double h,
                std::span<double> out);
void noise_divergence(std::span<const double> f, const NoiseField& field,
                      std::span<const double> dbeta, double h, std::span<double> out);
void stratonovich_correction(std::span<const double> f, std::span<const double> df,
                             const NoiseField& field, double h, std::span<double> out);

}  // namespace omp

}  // namespace stfe
