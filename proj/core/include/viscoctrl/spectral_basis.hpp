#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace viscoctrl {

/// Eigenvalue data of the Dirichlet operator A and the boundary traces of its
/// eigenfunctions on the active boundary part.
///
/// Mode n carries lambda_n > 0 (A phi_n = -lambda_n^2 phi_n) and the traction
/// trace of phi_n at each quadrature node of the active boundary. Interior
/// values of phi_n are never needed. For scalar models the trace is the
/// inward normal derivative. Repeated eigenvalues stay as distinct modes.
class EigenBasis {
 public:
  /// dimension = 0 marks an abstract basis. traces is mode_count x node_count.
  /// Throws std::invalid_argument when lambdas are not positive and
  /// nondecreasing, weights are not positive, or shapes disagree.
  EigenBasis(int dimension, std::vector<double> lambdas, Eigen::MatrixXd traces,
             std::vector<double> gamma_weights);

  int dimension() const noexcept { return dimension_; }
  std::size_t mode_count() const noexcept { return lambdas_.size(); }
  std::size_t node_count() const noexcept { return weights_.size(); }

  double lambda(std::size_t n) const { return lambdas_.at(n); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  const Eigen::MatrixXd& traces() const noexcept { return traces_; }
  double trace(std::size_t n, std::size_t node) const { return traces_(n, node); }
  /// Psi_n = trace_n / lambda_n at one node.
  double normalized_trace(std::size_t n, std::size_t node) const {
    return traces_(n, node) / lambdas_[n];
  }
  std::span<const double> gamma_weights() const noexcept { return weights_; }
  double gamma_measure() const noexcept;

  /// Quadrature pairing sum_q w_q trace_n(x_q) profile(x_q).
  double pairing(std::size_t n, std::span<const double> profile) const;

  /// First count modes.
  EigenBasis truncated(std::size_t count) const;

 private:
  int dimension_;
  std::vector<double> lambdas_;
  Eigen::MatrixXd traces_;
  std::vector<double> weights_;
};

enum class Endpoint { left, right, both };
enum class RectangleEdge { bottom, top, left, right };

/// Dirichlet sine basis on (0, length): lambda_n = n pi / length,
/// phi_n = sqrt(2/length) sin(n pi x / length). One unit-weight node per
/// selected endpoint.
EigenBasis interval_basis(std::size_t modes, double length, Endpoint control_end);

/// Product sine basis on (0,Lx) x (0,Ly), modes sorted by lambda with ties
/// broken by (m, k). Traces sampled at n_quad composite-trapezoid nodes of one
/// edge.
EigenBasis rectangle_basis(std::size_t nx, std::size_t ny, double lx, double ly,
                           RectangleEdge edge, std::size_t n_quad);

/// Reads an abstract basis: first row "weights,w_1,...,w_q", then one row
/// "lambda_n,trace_n1,...,trace_nq" per mode. '#' lines are comments.
EigenBasis load_basis_csv(const std::filesystem::path& path);

struct WeylBounds {
  double lower = 0.0;  // min_n lambda_n^2 / n^{2/d}
  double upper = 0.0;  // max_n lambda_n^2 / n^{2/d}
};

/// Bounds of lambda_n^2 / n^{2/d} over the available modes. Requires at least
/// 10 modes and reports an ordering violation as std::invalid_argument.
WeylBounds check_weyl_asymptotics(std::span<const double> lambdas, int dimension);
WeylBounds check_weyl_asymptotics(const EigenBasis& basis, int dimension);

}  // namespace viscoctrl
