#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "viscoctrl/control_signal.hpp"
#include "viscoctrl/cosine_algebra.hpp"
#include "viscoctrl/kernel_engine.hpp"
#include "viscoctrl/modal_solver.hpp"
#include "viscoctrl/spectral_basis.hpp"
#include "viscoctrl/time_grid.hpp"

namespace viscoctrl {

enum class DynamicsKind { elastic, viscoelastic };

/// Linear map from control samples to terminal modal data.
///
/// Columns are indexed j * P + p (time node j, profile p); a control with
/// amplitudes a(j, p) maps to sum_col map(:, col) a(col). Rows 0..N-1 hold the
/// velocity w'_n(T) / lambda_n (H^-1 weight), rows N..2N-1 the displacement
/// w_n(T) (L2 weight). Time integrals use trapezoid weights.
///
/// Viscoelastic maps are stored for v = exp(-a t/2) w, where the memory
/// perturbation has no damping part; physical_map() returns the map for w.
struct MomentMatrix {
  DynamicsKind kind = DynamicsKind::elastic;
  TimeGrid grid;
  Eigen::MatrixXd profiles;      // P x q
  Eigen::MatrixXd profile_gram;  // P x P, positive definite
  std::vector<double> lambdas;
  Eigen::MatrixXd map;
  double damping = 0.0;  // a = R(0)
  std::string kernel_descriptor = "zero";

  std::size_t mode_count() const noexcept { return lambdas.size(); }
  std::size_t profile_count() const noexcept { return static_cast<std::size_t>(profiles.rows()); }

  /// Rows of the first modes only; columns unchanged.
  MomentMatrix truncated(std::size_t modes) const;

  /// Map acting on the original variables.
  Eigen::MatrixXd physical_map() const;

  /// Map composed with the inverse square root of the control metric
  /// diag(trapezoid weights) (x) profile_gram, so that Euclidean norms of its
  /// argument equal L2(0,T; L2(Gamma)) norms of the control.
  Eigen::MatrixXd orthonormal_map(bool physical = true) const;

  /// Amplitudes (grid nodes x P) of the control with orthonormal coordinates x.
  Eigen::MatrixXd amplitudes_from_orthonormal(const Eigen::VectorXd& x) const;

  /// Real Gramian A A^T of the orthonormal physical map.
  Eigen::MatrixXd gramian() const;

  /// Gramian of the exponential moment rows e^{+-i lambda_n s}: U (A A^T) U^*
  /// with U = [[I, iI], [I, -iI]], Hermitian.
  Eigen::MatrixXcd exponential_gramian() const;

  /// Terminal data [w'(T)/lambda; w(T)] produced by a control on this grid.
  Eigen::VectorXd apply(const ControlSignal& control) const;
};

MomentMatrix build_elastic_moment_matrix(const EigenBasis& basis, double horizon, const TimeGrid& grid,
                                         const Eigen::MatrixXd& profiles);

/// Throws NumericalGuardError when the resolvent or a mode is under-resolved.
MomentMatrix build_viscoelastic_moment_matrix(const EigenBasis& basis, const MemoryKernel& kernel,
                                              double horizon, const TimeGrid& grid,
                                              const Eigen::MatrixXd& profiles);

/// Stacked weighted target [eta_n / lambda_n; xi_n].
Eigen::VectorXd weighted_target(const CoeffState& target_xi, const CoeffState& target_eta,
                                const std::vector<double>& lambdas);

struct ControlSolution {
  ControlSignal control;
  double residual = 0.0;      // H^-1 x L2 distance of the predicted terminal state
  double control_norm = 0.0;  // L2(0,T; L2(Gamma))
  std::size_t rank = 0;       // retained singular values
  double sigma_max = 0.0;
  double sigma_min_retained = 0.0;
};

/// Least-norm control for the physical map by truncated SVD; singular values
/// below reg * sigma_max are dropped (reg = 0: machine-precision cut).
/// target_xi carries scale L2 and target_eta scale Hm1.
ControlSolution min_norm_control(const CoeffState& target_xi, const CoeffState& target_eta,
                                 const MomentMatrix& mm, double reg = 1e-10);

struct SteerReport {
  double terminal_error = 0.0;
  double control_norm = 0.0;
  CoeffState terminal_displacement;
  CoeffState terminal_velocity;
};

/// Forward-simulates the memory form driven by control (zero initial data)
/// and measures the H^-1 x L2 distance of (w'(T), w(T)) from the target.
SteerReport steer_and_verify(const ControlSignal& control, const MemoryKernel& kernel,
                             const EigenBasis& basis, const CoeffState& target_xi,
                             const CoeffState& target_eta,
                             Scheme scheme = Scheme::exponential_trapezoid);

struct GapSpectrum {
  Eigen::VectorXd sigma;       // descending
  std::vector<double> ratios;  // sigma_k / sigma_1
  double exponent = 0.0;       // slope of log sigma_k against log k
  double log_prefactor = 0.0;
  std::size_t fit_first = 0;   // 1-based k range of the fit
  std::size_t fit_last = 0;
};

/// Singular values of the difference of the orthonormal damping-free maps.
/// The power-law fit uses k in [fit_first, fit_last] (1-based, clipped to
/// nonzero values); fit_last = 0 selects the mode count.
GapSpectrum reachability_gap(const MomentMatrix& mm_e, const MomentMatrix& mm_v,
                             std::size_t fit_first = 1, std::size_t fit_last = 0);

}  // namespace viscoctrl
