#include "viscoctrl/control_signal.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace viscoctrl {

ControlSignal::ControlSignal(TimeGrid grid, Eigen::MatrixXd profiles, Eigen::MatrixXd amplitudes)
    : grid_(grid), profiles_(std::move(profiles)), amplitudes_(std::move(amplitudes)) {
  if (!(grid_.horizon() > 0.0)) throw std::invalid_argument("control signal: horizon must be positive");
  if (profiles_.rows() == 0 || profiles_.cols() == 0) {
    throw std::invalid_argument("control signal: at least one nonempty profile required");
  }
  if (static_cast<std::size_t>(amplitudes_.rows()) != grid_.size() || amplitudes_.cols() != profiles_.rows()) {
    throw std::invalid_argument(fmt::format("control signal: amplitudes are {}x{}, expected {}x{}",
                                            amplitudes_.rows(), amplitudes_.cols(), grid_.size(),
                                            profiles_.rows()));
  }
}

ControlSignal ControlSignal::zero(TimeGrid grid, Eigen::MatrixXd profiles) {
  const auto p = profiles.rows();
  return ControlSignal(grid, std::move(profiles),
                       Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.size()), p));
}

Eigen::VectorXd ControlSignal::boundary_values(std::size_t j) const {
  return profiles_.transpose() * amplitudes_.row(static_cast<Eigen::Index>(j)).transpose();
}

double ControlSignal::norm(const EigenBasis& basis) const {
  const Eigen::MatrixXd gram = profile_gram(basis, profiles_);
  const auto w = trapezoid_weights(grid_);
  double s = 0.0;
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    const auto a = amplitudes_.row(static_cast<Eigen::Index>(j));
    s += w[j] * (a * gram * a.transpose())(0, 0);
  }
  return std::sqrt(std::max(0.0, s));
}

Eigen::MatrixXd ControlSignal::modal_forcing(const EigenBasis& basis) const {
  if (static_cast<std::size_t>(profiles_.cols()) != basis.node_count()) {
    throw std::invalid_argument("control signal: profile length differs from boundary node count");
  }
  const Eigen::Map<const Eigen::VectorXd> w(basis.gamma_weights().data(),
                                            static_cast<Eigen::Index>(basis.node_count()));
  // pairing(n, p) = sum_x w_x trace_n(x) profile_p(x)
  const Eigen::MatrixXd pairing = basis.traces() * w.asDiagonal() * profiles_.transpose();
  return pairing * amplitudes_.transpose();
}

Eigen::MatrixXd profile_gram(const EigenBasis& basis, const Eigen::MatrixXd& profiles) {
  if (static_cast<std::size_t>(profiles.cols()) != basis.node_count()) {
    throw std::invalid_argument("profile gram: profile length differs from boundary node count");
  }
  const Eigen::Map<const Eigen::VectorXd> w(basis.gamma_weights().data(),
                                            static_cast<Eigen::Index>(basis.node_count()));
  return profiles * w.asDiagonal() * profiles.transpose();
}

}  // namespace viscoctrl
