#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "viscoctrl/control_signal.hpp"
#include "viscoctrl/spectral_basis.hpp"
#include "viscoctrl/time_grid.hpp"

namespace viscoctrl {

/// Sobolev order of the norm attached to a coefficient sequence: the weight
/// of mode n is lambda_n^order. Orders outside [-1, 1] arise from powers of
/// the generator and are kept as plain integers.
enum class Scale : int { Hm1 = -1, L2 = 0, H10 = 1 };

inline int order(Scale s) noexcept { return static_cast<int>(s); }

/// Coefficients alpha_n of a field in the eigenbasis.
struct CoeffState {
  std::vector<std::complex<double>> coeffs;
  Scale scale = Scale::L2;

  static CoeffState zero(std::size_t modes, Scale scale);
  /// Unit coefficient on mode index (0-based).
  static CoeffState unit(std::size_t modes, std::size_t index, Scale scale);
  static CoeffState from_real(const std::vector<double>& values, Scale scale);

  std::size_t size() const noexcept { return coeffs.size(); }
  /// (sum_n lambda_n^{2 order} |alpha_n|^2)^{1/2}.
  double norm(const EigenBasis& basis) const;
  /// Real parts; throws when an imaginary part exceeds tol * max |alpha|.
  std::vector<double> real_values(double tol = 0.0) const;
};

/// alpha_n -> alpha_n cos(lambda_n t).
CoeffState apply_cosine(const CoeffState& state, double t, const EigenBasis& basis);

/// alpha_n -> i alpha_n sin(lambda_n t).
CoeffState apply_sine(const CoeffState& state, double t, const EigenBasis& basis);

/// alpha_n -> (i lambda_n)^k alpha_n; the scale order drops by k.
CoeffState apply_calA_power(const CoeffState& state, int k, const EigenBasis& basis);

/// Interior forcing coefficients F_n(t_j), modes x nodes.
struct ForcingSeries {
  TimeGrid grid;
  Eigen::MatrixXcd values;

  static ForcingSeries zero(const TimeGrid& grid, std::size_t modes);
};

/// Elastic solution at time t:
///   u_n(t) = u0_n cos(l t) + u1_n sin(l t)/l
///          + int_0^t sin(l(t-s))/l (F_n(s) + <trace_n, f(s)>) ds
/// and its time derivative. Forcing and control enter through trapezoid sums
/// on their own grids (zero beyond their horizon), which must not exceed t.
/// Either may be null. u0 must carry scale H10 or L2, u1 one order lower.
std::pair<CoeffState, CoeffState> elastic_solution(const CoeffState& u0, const CoeffState& u1,
                                                   const ForcingSeries* forcing,
                                                   const ControlSignal* control, double t,
                                                   const EigenBasis& basis);

/// max_n |[R-(s)R+(r) - (R-(s+r) + R-(s-r))/2] alpha|_n.
double check_product_identity(double s, double r, const CoeffState& state, const EigenBasis& basis);

}  // namespace viscoctrl
