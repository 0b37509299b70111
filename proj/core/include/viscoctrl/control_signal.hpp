#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "viscoctrl/spectral_basis.hpp"
#include "viscoctrl/time_grid.hpp"

namespace viscoctrl {

/// Boundary datum f(x, t) = sum_p amplitude(t, p) * profile_p(x), piecewise
/// linear in time between grid nodes.
class ControlSignal {
 public:
  /// profiles is P x q (one row per spatial shape on the q boundary nodes);
  /// amplitudes is grid.size() x P.
  ControlSignal(TimeGrid grid, Eigen::MatrixXd profiles, Eigen::MatrixXd amplitudes);

  static ControlSignal zero(TimeGrid grid, Eigen::MatrixXd profiles);

  const TimeGrid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXd& profiles() const noexcept { return profiles_; }
  const Eigen::MatrixXd& amplitudes() const noexcept { return amplitudes_; }
  std::size_t profile_count() const noexcept { return static_cast<std::size_t>(profiles_.rows()); }

  /// Boundary values at time node j (length q).
  Eigen::VectorXd boundary_values(std::size_t j) const;

  /// L2(0,T; L2(Gamma)) norm: trapezoid in time, basis quadrature on Gamma.
  double norm(const EigenBasis& basis) const;

  /// beta_n(t_j) = <trace_n, f(t_j)>_Gamma, modes x nodes.
  Eigen::MatrixXd modal_forcing(const EigenBasis& basis) const;

 private:
  TimeGrid grid_;
  Eigen::MatrixXd profiles_;
  Eigen::MatrixXd amplitudes_;
};

/// Gram matrix sum_x w_x profile_p(x) profile_r(x) of the spatial shapes.
Eigen::MatrixXd profile_gram(const EigenBasis& basis, const Eigen::MatrixXd& profiles);

}  // namespace viscoctrl
