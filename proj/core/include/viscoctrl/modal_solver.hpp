#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "viscoctrl/cosine_algebra.hpp"
#include "viscoctrl/kernel_engine.hpp"
#include "viscoctrl/spectral_basis.hpp"
#include "viscoctrl/time_grid.hpp"

namespace viscoctrl {

/// Time series (Z(t_j), Z'(t_j)) of one mode.
struct ModalTrajectory {
  TimeGrid grid;
  std::vector<double> z;
  std::vector<double> zp;
};

/// Time discretizations of w'' = -lambda^2 w + b w + (Q*w) + g.
///
/// exponential_trapezoid marches the equivalent Volterra form
///   w(t) = z0 cos(l t) + z1 sin(l t)/l + int_0^t sin(l(t-s))/l G(s) ds,
///   G = b w + Q*w + g,
/// with trapezoid quadrature for both convolutions. It is exact when G = 0.
/// velocity_verlet is the Stoermer step with the history sum evaluated at the
/// new node from the predicted displacement.
enum class Scheme { exponential_trapezoid, velocity_verlet };

/// Largest admissible step * lambda.
inline constexpr double kResolutionLimit = 0.5;

/// Memory form w'' = -lambda^2 (w + M*w) + g. g may be empty (no forcing) or
/// hold one sample per grid node. mode_index only labels guard errors.
ModalTrajectory solve_modal_memory(double lambda, const MemoryKernel& kernel, double z0, double z1,
                                   std::span<const double> g, const TimeGrid& grid,
                                   Scheme scheme = Scheme::exponential_trapezoid,
                                   std::size_t mode_index = 0);

/// Damping-free MacCamy form w'' = -lambda^2 w + b w + K*w + g1. K must be
/// sampled with the grid step and cover the grid.
ModalTrajectory solve_modal_maccamy(double lambda, double b, std::span<const double> K, double z0,
                                    double z1, std::span<const double> g1, const TimeGrid& grid,
                                    Scheme scheme = Scheme::exponential_trapezoid,
                                    std::size_t mode_index = 0);

/// Solves the memory form for w and, independently, the MacCamy form for
/// v = exp(-a t/2) w with the initial-data forcing -R w1 - R' w0, and returns
/// max_j |w(t_j) - exp(a t_j/2) v(t_j)|.
double maccamy_equivalence_residual(double lambda, const MemoryKernel& kernel, double z0, double z1,
                                    const TimeGrid& grid,
                                    Scheme scheme = Scheme::exponential_trapezoid);

/// Picard terms of v = u + l*v with u the elastic solution and
/// l(t) = (b sin(lambda t) + (K * sin(lambda .))(t)) / lambda.
/// Entry k holds l^{*k} * u on the grid. Requires constants.a == 0.
std::vector<std::vector<double>> picard_terms(double lambda, const MacCamyConstants& constants,
                                              double z0, double z1, const TimeGrid& grid,
                                              std::size_t n_terms);

/// Sum of the first n_terms Picard terms at the last grid node, per mode,
/// for displacement data xi and velocity data eta.
CoeffState picard_series(const CoeffState& xi, const CoeffState& eta,
                         const MacCamyConstants& constants, const TimeGrid& grid,
                         const EigenBasis& basis, std::size_t n_terms);

/// Solution of the damping-free MacCamy form with data (0, 1) and no forcing:
/// the response to a unit velocity impulse at t = 0.
ModalTrajectory impulse_response(double lambda, const MacCamyConstants& normalized,
                                 const TimeGrid& grid, std::size_t mode_index = 0);

/// Per-mode response to an impulsive boundary input with the given spatial
/// profile at t = 0, zero initial data: <trace_n, profile> times the impulse
/// response, in the original variables. constants == nullptr means elastic
/// dynamics, whose response is sin(lambda_n t)/lambda_n.
std::vector<ModalTrajectory> boundary_response_kernel(const EigenBasis& basis,
                                                      const MacCamyConstants* constants,
                                                      std::span<const double> profile,
                                                      const TimeGrid& grid);

/// CSV text with columns t, z_1, zp_1, ..., z_N, zp_N.
std::string trajectories_to_csv(const std::vector<ModalTrajectory>& modes);

}  // namespace viscoctrl
