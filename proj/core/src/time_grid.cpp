#include "viscoctrl/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "viscoctrl/errors.hpp"

namespace viscoctrl {

ResolutionGuardError::ResolutionGuardError(std::size_t mode_index, double lambda, double step)
    : NumericalGuardError("resolution guard violated at mode " + std::to_string(mode_index) +
                          ": step * lambda = " + std::to_string(step * lambda) + " > 0.5"),
      mode_index_(mode_index),
      lambda_(lambda) {}

TimeGrid TimeGrid::uniform(double horizon, std::size_t intervals) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time grid: horizon must be positive and finite");
  }
  if (intervals == 0) {
    throw std::invalid_argument("time grid: at least one interval required");
  }
  return TimeGrid{horizon / static_cast<double>(intervals), intervals};
}

TimeGrid TimeGrid::with_step(double horizon, double step) {
  if (!(step > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("time grid: step and horizon must be positive");
  }
  const double ratio = horizon / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-12 * std::max(1.0, ratio)) {
    throw std::invalid_argument("time grid: step " + std::to_string(step) +
                                " does not divide horizon " + std::to_string(horizon));
  }
  return TimeGrid{step, static_cast<std::size_t>(rounded)};
}

bool TimeGrid::same_as(const TimeGrid& other) const noexcept {
  return intervals == other.intervals &&
         std::abs(step - other.step) <= 1e-12 * std::max(std::abs(step), std::abs(other.step));
}

std::vector<double> trapezoid_weights(const TimeGrid& grid) {
  std::vector<double> w(grid.size(), grid.step);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double trapezoid_convolution_at(std::span<const double> f, std::span<const double> g,
                                std::size_t k, double h) {
  if (k == 0) return 0.0;
  double acc = 0.5 * (f[k] * g[0] + f[0] * g[k]);
  for (std::size_t j = 1; j < k; ++j) acc += f[k - j] * g[j];
  return h * acc;
}

std::vector<double> trapezoid_convolution(std::span<const double> f, std::span<const double> g,
                                          double h) {
  const std::size_t n = std::min(f.size(), g.size());
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) out[k] = trapezoid_convolution_at(f, g, k, h);
  return out;
}

}  // namespace viscoctrl
