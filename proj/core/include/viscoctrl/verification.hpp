#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "viscoctrl/cosine_algebra.hpp"
#include "viscoctrl/kernel_engine.hpp"
#include "viscoctrl/moment_control.hpp"
#include "viscoctrl/spectral_basis.hpp"
#include "viscoctrl/time_grid.hpp"

namespace viscoctrl {

struct InequalityReport {
  double constant_estimate = 0.0;  // sup of the sampled ratios
  double exact_constant = 0.0;     // largest squared singular value of the trace map
  std::size_t sample_count = 0;    // samples with nonzero data
  std::string worst_case_input;
  std::vector<double> running_sup;  // sup after each accepted sample
  double horizon = 0.0;
  double step = 0.0;
  std::size_t modes = 0;
  std::uint64_t seed = 0;
};

/// Which modal equation the trace map is built from.
enum class TraceForm {
  memory,           // w'' = -lambda^2 (w + M*w)
  maccamy_normalized  // damping-free MacCamy form of exp(-a t/2) w
};

/// Trace map B with columns (mode n, data kind) and rows (time node, Gamma
/// node): entry sqrt(w_j w_q) trace_n(x_q) psi(t_j), where psi solves the
/// homogeneous equation with data (1/lambda_n, 0) for the first N columns
/// and (0, 1) for the last N. |B x|^2 is the trapezoid value of
/// |T w|^2_{L2(0,T;L2(Gamma))} for initial data with (lambda w0, w1) = x.
Eigen::MatrixXd trace_map(const EigenBasis& basis, const MemoryKernel& kernel, const TimeGrid& grid,
                          TraceForm form = TraceForm::memory);

/// |T w|^2 / (|w0|^2_{H10} + |w1|^2_{L2}) for one homogeneous run, computed by
/// direct simulation. nullopt for zero data.
std::optional<double> trace_energy_ratio(const EigenBasis& basis, const MemoryKernel& kernel,
                                         const TimeGrid& grid, const std::vector<double>& w0,
                                         const std::vector<double>& w1);

/// Sup of the trace-energy ratio over n_samples Gaussian directions of
/// (lambda w0, w1) drawn from seed.
InequalityReport direct_inequality_ratio(const EigenBasis& basis, const MemoryKernel& kernel,
                                         double horizon, double step, std::size_t n_samples,
                                         std::uint64_t seed);

struct InverseReport {
  double m_hat = 0.0;  // smallest eigenvalue of the exponential Gramian
  double gramian_min = 0.0;
  double gramian_max = 0.0;
  std::size_t modes = 0;
};

/// Smallest eigenvalue of the exponential Gramian of the physical map.
InverseReport inverse_inequality_constant(const MomentMatrix& mm);

/// Smallest singular value of (xi, eta) -> T psi on Gamma x (0, T) over the
/// unit H10 x L2 sphere, for the damping-free MacCamy dynamics and the first
/// modes of basis, scaled by sqrt(2) to the normalization of the exponential
/// Gramian (its square matches inverse_inequality_constant in the elastic
/// case).
double orthogonality_test(const EigenBasis& basis, const MemoryKernel& kernel, double horizon,
                          double step, std::size_t modes);

}  // namespace viscoctrl
