#include "viscoctrl/modal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "viscoctrl/csv_io.hpp"
#include "viscoctrl/errors.hpp"
#include "viscoctrl/parallel.hpp"

namespace viscoctrl {

namespace {

void check_inputs(double lambda, std::span<const double> g, const TimeGrid& grid, std::size_t mode_index) {
  if (!(lambda > 0.0)) throw std::invalid_argument("modal solver: lambda must be positive");
  if (grid.intervals == 0 || !(grid.step > 0.0)) throw std::invalid_argument("modal solver: empty grid");
  if (!g.empty() && g.size() < grid.size()) {
    throw std::invalid_argument(fmt::format("modal solver: forcing has {} samples, grid has {} nodes",
                                            g.size(), grid.size()));
  }
  if (grid.step * lambda > kResolutionLimit) throw ResolutionGuardError(mode_index, lambda, grid.step);
}

// (Q*w)(t_k) by trapezoid, with w known on nodes 0..k.
double history(std::span<const double> Q, const std::vector<double>& w, std::size_t k, double h) {
  if (Q.empty() || k == 0) return 0.0;
  double acc = 0.5 * (Q[k] * w[0] + Q[0] * w[k]);
  for (std::size_t j = 1; j < k; ++j) acc += Q[k - j] * w[j];
  return h * acc;
}

// w'' = -lambda^2 w + b w + Q*w + g. Q empty means no memory term.
ModalTrajectory solve_core(double lambda, double b, std::span<const double> Q, double z0, double z1,
                           std::span<const double> g, const TimeGrid& grid, Scheme scheme) {
  const std::size_t n = grid.size();
  const double h = grid.step;
  auto force = [&](std::size_t k) { return g.empty() ? 0.0 : g[k]; };

  ModalTrajectory out{grid, std::vector<double>(n), std::vector<double>(n)};
  auto& w = out.z;
  auto& wp = out.zp;
  w[0] = z0;
  wp[0] = z1;

  if (scheme == Scheme::velocity_verlet) {
    const double stiff = b - lambda * lambda;
    double acc = stiff * z0 + force(0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      w[k + 1] = w[k] + h * wp[k] + 0.5 * h * h * acc;
      const double next = stiff * w[k + 1] + history(Q, w, k + 1, h) + force(k + 1);
      wp[k + 1] = wp[k] + 0.5 * h * (acc + next);
      acc = next;
    }
    return out;
  }

  std::vector<double> S(n), C(n), G(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double phase = lambda * grid.at(m);
    S[m] = std::sin(phase) / lambda;
    C[m] = std::cos(phase);
  }
  G[0] = b * z0 + force(0);
  for (std::size_t k = 1; k < n; ++k) {
    double sS = 0.5 * S[k] * G[0];
    double sC = 0.5 * C[k] * G[0];
    for (std::size_t j = 1; j < k; ++j) {
      sS += S[k - j] * G[j];
      sC += C[k - j] * G[j];
    }
    // S[0] = 0, so G[k] does not enter w[k] and the march stays explicit.
    w[k] = z0 * C[k] + z1 * S[k] + h * sS;
    G[k] = b * w[k] + history(Q, w, k, h) + force(k);
    wp[k] = -lambda * lambda * z0 * S[k] + z1 * C[k] + h * (sC + 0.5 * G[k]);
  }
  return out;
}

void require_kernel_grid(std::span<const double> K, const TimeGrid& constants_grid, const TimeGrid& grid) {
  if (std::abs(constants_grid.step - grid.step) > 1e-12 * grid.step) {
    throw std::invalid_argument("modal solver: kernel step differs from grid step");
  }
  if (K.size() < grid.size()) {
    throw std::invalid_argument("modal solver: kernel samples do not cover the grid");
  }
}

}  // namespace

ModalTrajectory solve_modal_memory(double lambda, const MemoryKernel& kernel, double z0, double z1,
                                   std::span<const double> g, const TimeGrid& grid, Scheme scheme,
                                   std::size_t mode_index) {
  check_inputs(lambda, g, grid, mode_index);
  std::vector<double> Q;
  if (!kernel.vanishes()) {
    Q = kernel.sample_on(grid);
    for (double& q : Q) q *= -lambda * lambda;
  }
  return solve_core(lambda, 0.0, Q, z0, z1, g, grid, scheme);
}

ModalTrajectory solve_modal_maccamy(double lambda, double b, std::span<const double> K, double z0,
                                    double z1, std::span<const double> g1, const TimeGrid& grid,
                                    Scheme scheme, std::size_t mode_index) {
  check_inputs(lambda, g1, grid, mode_index);
  if (!K.empty() && K.size() < grid.size()) {
    throw std::invalid_argument("modal solver: kernel samples do not cover the grid");
  }
  return solve_core(lambda, b, K, z0, z1, g1, grid, scheme);
}

double maccamy_equivalence_residual(double lambda, const MemoryKernel& kernel, double z0, double z1,
                                    const TimeGrid& grid, Scheme scheme) {
  const auto w = solve_modal_memory(lambda, kernel, z0, z1, {}, grid, scheme);

  const auto resolvent = resolvent_kernel(kernel, grid.step, grid.horizon());
  const auto constants = maccamy_constants(resolvent);
  const auto normalized = without_damping(constants);
  require_kernel_grid(normalized.K, normalized.grid, grid);

  const double a = constants.a;
  std::vector<double> g1(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double f1 = -constants.R[k] * z1 - constants.dR[k] * z0;
    g1[k] = std::exp(-0.5 * a * grid.at(k)) * f1;
  }
  const auto v = solve_modal_maccamy(lambda, normalized.b, normalized.K, z0, z1 - 0.5 * a * z0, g1, grid, scheme);

  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    worst = std::max(worst, std::abs(w.z[k] - std::exp(0.5 * a * grid.at(k)) * v.z[k]));
  }
  return worst;
}

std::vector<std::vector<double>> picard_terms(double lambda, const MacCamyConstants& constants,
                                              double z0, double z1, const TimeGrid& grid,
                                              std::size_t n_terms) {
  if (n_terms == 0) throw std::invalid_argument("picard series: at least one term");
  if (constants.a != 0.0) throw std::invalid_argument("picard series: constants must have a = 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("picard series: lambda must be positive");
  const std::size_t n = grid.size();
  const bool has_kernel = !constants.K.empty();
  if (has_kernel) require_kernel_grid(constants.K, constants.grid, grid);

  std::vector<double> sine(n), u(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = lambda * grid.at(k);
    sine[k] = std::sin(phase);
    u[k] = z0 * std::cos(phase) + z1 * sine[k] / lambda;
  }
  std::vector<double> ell(n);
  const auto ksin = has_kernel ? trapezoid_convolution(std::span(constants.K).first(n), sine, grid.step)
                               : std::vector<double>(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) ell[k] = (constants.b * sine[k] + ksin[k]) / lambda;

  std::vector<std::vector<double>> terms;
  terms.reserve(n_terms);
  terms.push_back(std::move(u));
  while (terms.size() < n_terms) terms.push_back(trapezoid_convolution(ell, terms.back(), grid.step));
  return terms;
}

CoeffState picard_series(const CoeffState& xi, const CoeffState& eta, const MacCamyConstants& constants,
                         const TimeGrid& grid, const EigenBasis& basis, std::size_t n_terms) {
  if (xi.size() != basis.mode_count() || eta.size() != basis.mode_count()) {
    throw std::invalid_argument("picard series: data length differs from mode count");
  }
  CoeffState out = CoeffState::zero(basis.mode_count(), Scale::L2);
  const std::size_t last = grid.size() - 1;
  parallel_for(basis.mode_count(), [&](std::size_t m) {
    const double l = basis.lambda(m);
    double p0 = 0.0, p1 = 0.0;
    for (const auto& t : picard_terms(l, constants, 1.0, 0.0, grid, n_terms)) p0 += t[last];
    for (const auto& t : picard_terms(l, constants, 0.0, 1.0, grid, n_terms)) p1 += t[last];
    out.coeffs[m] = xi.coeffs[m] * p0 + eta.coeffs[m] * p1;
  });
  return out;
}

ModalTrajectory impulse_response(double lambda, const MacCamyConstants& normalized, const TimeGrid& grid,
                                 std::size_t mode_index) {
  if (normalized.a != 0.0) throw std::invalid_argument("impulse response: constants must have a = 0");
  if (!normalized.K.empty()) require_kernel_grid(normalized.K, normalized.grid, grid);
  return solve_modal_maccamy(lambda, normalized.b, normalized.K, 0.0, 1.0, {}, grid,
                             Scheme::exponential_trapezoid, mode_index);
}

std::vector<ModalTrajectory> boundary_response_kernel(const EigenBasis& basis,
                                                      const MacCamyConstants* constants,
                                                      std::span<const double> profile,
                                                      const TimeGrid& grid) {
  if (profile.size() != basis.node_count()) {
    throw std::invalid_argument("boundary response: profile length differs from boundary node count");
  }
  const std::size_t n = grid.size();
  std::vector<ModalTrajectory> out(basis.mode_count());
  const MacCamyConstants normalized =
      constants != nullptr ? without_damping(*constants) : MacCamyConstants{};
  const double a = constants != nullptr ? constants->a : 0.0;

  parallel_for(basis.mode_count(), [&](std::size_t m) {
    const double l = basis.lambda(m);
    const double pair = basis.pairing(m, profile);
    ModalTrajectory tr{grid, std::vector<double>(n), std::vector<double>(n)};
    if (constants == nullptr) {
      if (grid.step * l > kResolutionLimit) throw ResolutionGuardError(m, l, grid.step);
      for (std::size_t k = 0; k < n; ++k) {
        const double phase = l * grid.at(k);
        tr.z[k] = pair * (std::sin(phase) / l);
        tr.zp[k] = pair * std::cos(phase);
      }
    } else {
      const auto v = impulse_response(l, normalized, grid, m);
      for (std::size_t k = 0; k < n; ++k) {
        const double e = std::exp(0.5 * a * grid.at(k));
        tr.z[k] = pair * e * v.z[k];
        tr.zp[k] = pair * e * (v.zp[k] + 0.5 * a * v.z[k]);
      }
    }
    out[m] = std::move(tr);
  });
  return out;
}

std::string trajectories_to_csv(const std::vector<ModalTrajectory>& modes) {
  if (modes.empty()) throw std::invalid_argument("trajectory export: no modes");
  const TimeGrid& grid = modes.front().grid;
  CsvTable table;
  std::vector<double> t(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) t[k] = grid.at(k);
  table.add_column("t", std::move(t));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (!modes[m].grid.same_as(grid)) throw std::invalid_argument("trajectory export: grids differ");
    table.add_column(fmt::format("z_{}", m + 1), modes[m].z);
    table.add_column(fmt::format("zp_{}", m + 1), modes[m].zp);
  }
  return table.to_string();
}

}  // namespace viscoctrl
