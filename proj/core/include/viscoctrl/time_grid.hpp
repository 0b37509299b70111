#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace viscoctrl {

/// Uniform time grid t_j = j * step, j = 0..intervals.
struct TimeGrid {
  double step = 0.0;
  std::size_t intervals = 0;

  /// Grid with the given number of intervals spanning [0, horizon].
  static TimeGrid uniform(double horizon, std::size_t intervals);

  /// Grid with the given step whose last node is horizon. Throws when step
  /// does not divide horizon to 1e-12 relative.
  static TimeGrid with_step(double horizon, double step);

  double horizon() const noexcept { return step * static_cast<double>(intervals); }
  std::size_t size() const noexcept { return intervals + 1; }
  double at(std::size_t j) const noexcept { return step * static_cast<double>(j); }

  bool same_as(const TimeGrid& other) const noexcept;
};

/// Composite trapezoid weights on the full grid.
std::vector<double> trapezoid_weights(const TimeGrid& grid);

/// Trapezoid value of int_0^{t_k} f(t_k - s) g(s) ds on samples with step h.
/// Returns 0 for k = 0.
double trapezoid_convolution_at(std::span<const double> f, std::span<const double> g,
                                std::size_t k, double h);

/// Trapezoid convolution at every node 0..min(|f|,|g|)-1.
std::vector<double> trapezoid_convolution(std::span<const double> f, std::span<const double> g,
                                          double h);

}  // namespace viscoctrl
