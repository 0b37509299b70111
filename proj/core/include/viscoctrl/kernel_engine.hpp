#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viscoctrl/time_grid.hpp"

namespace viscoctrl {

/// One exponential c * exp(-rate * t) of a Prony series.
struct PronyTerm {
  double weight = 0.0;
  double rate = 0.0;
};

/// Relaxation kernel M(t) of the memory term.
///
/// Three representations are supported: the zero kernel, a Prony series
/// sum_i c_i exp(-gamma_i t) with gamma_i >= 0, and samples on a uniform grid.
/// No sign or monotonicity condition is imposed.
class MemoryKernel {
 public:
  enum class Form { zero, prony, sampled };

  static MemoryKernel zero();
  static MemoryKernel prony(std::vector<PronyTerm> terms);
  /// Samples M(j * step), j = 0..values.size()-1. At least 3 samples.
  static MemoryKernel sampled(std::vector<double> values, double step);

  Form form() const noexcept { return form_; }
  std::span<const PronyTerm> terms() const noexcept { return terms_; }
  std::span<const double> samples() const noexcept { return samples_; }
  double sample_step() const noexcept { return sample_step_; }

  /// True for the zero form and for sampled/Prony data that vanish identically.
  bool vanishes() const noexcept;

  /// Largest Prony rate (0 for other forms).
  double max_rate() const noexcept;

  /// Values on the nodes of grid. Sampled kernels require the grid step to be
  /// an integer multiple of the sample step and the samples to cover the grid.
  std::vector<double> sample_on(const TimeGrid& grid) const;

  /// Exact value for analytic forms; throws for sampled kernels off-node.
  double value(double t) const;

  MemoryKernel scaled(double factor) const;

  /// Short human-readable description ("zero", "prony[0.5*exp(-1*t)]", ...).
  std::string descriptor() const;

 private:
  Form form_ = Form::zero;
  std::vector<PronyTerm> terms_;
  std::vector<double> samples_;
  double sample_step_ = 0.0;
};

/// Resolvent R of M, i.e. the solution of R + M*R = M, together with the
/// constants a = R(0), b = R'(0) and the kernel K = R''.
struct ResolventData {
  TimeGrid grid;
  /// Canonical samples of R: the closed form when one is known, otherwise the
  /// trapezoid-marched solution.
  std::vector<double> R;
  /// Trapezoid-marched solution, always computed.
  std::vector<double> marched_R;
  /// R(t) = weight * exp(-rate t) when the input is a single exponential.
  std::optional<PronyTerm> analytic;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> dR;  // R' samples
  std::vector<double> K;   // R'' samples
  double residual = 0.0;
  double residual_tolerance = 0.0;
};

/// Constants of the MacCamy form w'' = Lw + a w' + b w + K*w + F1.
struct MacCamyConstants {
  TimeGrid grid;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> K;
  std::vector<double> dR;
  std::vector<double> R;

  bool vanishes() const noexcept;
};

/// Solves R + M*R = M on [0, horizon] with step h by trapezoid marching.
/// Throws NumericalGuardError when max_i gamma_i * h > 1, and
/// std::invalid_argument for a non-positive step or horizon < 2h.
ResolventData resolvent_kernel(const MemoryKernel& kernel, double step, double horizon);

/// a = R(0), b = R'(0), K = R''. Closed-form derivatives when the analytic
/// form is stored, otherwise second-order finite differences (one-sided at the
/// ends). Requires at least 5 grid nodes.
MacCamyConstants maccamy_constants(const ResolventData& resolvent);

/// Removes the a w' term through v = exp(-a t / 2) w:
/// b -> b + a^2/4, K(t) -> exp(-a t / 2) K(t); the result has a = 0.
/// R and dR are carried over unchanged for the initial-data forcing.
MacCamyConstants without_damping(const MacCamyConstants& constants);

/// Max over the grid of |R + M*R - M| and |M - R - R*M| (trapezoid
/// convolutions). Throws when the kernel cannot be sampled on R's grid.
double verify_resolvent_identity(const MemoryKernel& kernel, const ResolventData& resolvent);

}  // namespace viscoctrl
