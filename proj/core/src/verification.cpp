#include "viscoctrl/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "viscoctrl/modal_solver.hpp"
#include "viscoctrl/parallel.hpp"

namespace viscoctrl {

namespace {

// Homogeneous trajectories per mode for data (1, 0) and (0, 1).
struct UnitSolutions {
  std::vector<ModalTrajectory> first;
  std::vector<ModalTrajectory> second;
};

UnitSolutions unit_solutions(const EigenBasis& basis, const MemoryKernel& kernel, const TimeGrid& grid,
                             TraceForm form) {
  const std::size_t N = basis.mode_count();
  UnitSolutions out{std::vector<ModalTrajectory>(N), std::vector<ModalTrajectory>(N)};
  if (form == TraceForm::memory) {
    parallel_for(N, [&](std::size_t m) {
      out.first[m] = solve_modal_memory(basis.lambda(m), kernel, 1.0, 0.0, {}, grid, Scheme::exponential_trapezoid, m);
      out.second[m] = solve_modal_memory(basis.lambda(m), kernel, 0.0, 1.0, {}, grid, Scheme::exponential_trapezoid, m);
    });
    return out;
  }
  const auto normalized = without_damping(maccamy_constants(resolvent_kernel(kernel, grid.step, grid.horizon())));
  parallel_for(N, [&](std::size_t m) {
    out.first[m] = solve_modal_maccamy(basis.lambda(m), normalized.b, normalized.K, 1.0, 0.0, {}, grid,
                                       Scheme::exponential_trapezoid, m);
    out.second[m] = solve_modal_maccamy(basis.lambda(m), normalized.b, normalized.K, 0.0, 1.0, {}, grid,
                                        Scheme::exponential_trapezoid, m);
  });
  return out;
}

}  // namespace

Eigen::MatrixXd trace_map(const EigenBasis& basis, const MemoryKernel& kernel, const TimeGrid& grid,
                          TraceForm form) {
  const auto sol = unit_solutions(basis, kernel, grid, form);
  const std::size_t N = basis.mode_count();
  const std::size_t Q = basis.node_count();
  const auto wt = trapezoid_weights(grid);
  const auto wg = basis.gamma_weights();
  Eigen::MatrixXd B(static_cast<Eigen::Index>(grid.size() * Q), static_cast<Eigen::Index>(2 * N));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t q = 0; q < Q; ++q) {
      const auto row = static_cast<Eigen::Index>(j * Q + q);
      const double sw = std::sqrt(wt[j] * wg[q]);
      for (std::size_t m = 0; m < N; ++m) {
        const double tr = sw * basis.trace(m, q);
        B(row, static_cast<Eigen::Index>(m)) = tr * sol.first[m].z[j] / basis.lambda(m);
        B(row, static_cast<Eigen::Index>(N + m)) = tr * sol.second[m].z[j];
      }
    }
  }
  return B;
}

std::optional<double> trace_energy_ratio(const EigenBasis& basis, const MemoryKernel& kernel,
                                         const TimeGrid& grid, const std::vector<double>& w0,
                                         const std::vector<double>& w1) {
  const std::size_t N = basis.mode_count();
  if (w0.size() != N || w1.size() != N) {
    throw std::invalid_argument("trace energy ratio: data length differs from mode count");
  }
  double energy = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    energy += basis.lambda(m) * basis.lambda(m) * w0[m] * w0[m] + w1[m] * w1[m];
  }
  if (energy == 0.0) return std::nullopt;

  std::vector<ModalTrajectory> tr(N);
  parallel_for(N, [&](std::size_t m) {
    tr[m] = solve_modal_memory(basis.lambda(m), kernel, w0[m], w1[m], {}, grid, Scheme::exponential_trapezoid, m);
  });
  const auto wt = trapezoid_weights(grid);
  const auto wg = basis.gamma_weights();
  double trace2 = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t q = 0; q < basis.node_count(); ++q) {
      double v = 0.0;
      for (std::size_t m = 0; m < N; ++m) v += basis.trace(m, q) * tr[m].z[j];
      trace2 += wt[j] * wg[q] * v * v;
    }
  }
  return trace2 / energy;
}

InequalityReport direct_inequality_ratio(const EigenBasis& basis, const MemoryKernel& kernel,
                                         double horizon, double step, std::size_t n_samples,
                                         std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("direct inequality: at least one sample");
  const TimeGrid grid = TimeGrid::with_step(horizon, step);
  const Eigen::MatrixXd B = trace_map(basis, kernel, grid, TraceForm::memory);

  InequalityReport report;
  report.horizon = horizon;
  report.step = step;
  report.modes = basis.mode_count();
  report.seed = seed;
  report.exact_constant = std::pow(Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues()(0), 2);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(B.cols());
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
    const double len = x.norm();
    if (len == 0.0) continue;
    const double ratio = (B * x).squaredNorm() / (len * len);
    if (report.sample_count == 0 || ratio > report.constant_estimate) {
      report.constant_estimate = ratio;
      report.worst_case_input = fmt::format("sample {} of seed {}", s, seed);
    }
    ++report.sample_count;
    report.running_sup.push_back(report.constant_estimate);
  }
  return report;
}

InverseReport inverse_inequality_constant(const MomentMatrix& mm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mm.gramian(), Eigen::EigenvaluesOnly);
  InverseReport r;
  r.modes = mm.mode_count();
  // The exponential Gramian U X U^* has the spectrum of 2 X since U U^* = 2 I.
  r.gramian_min = 2.0 * eig.eigenvalues()(0);
  r.gramian_max = 2.0 * eig.eigenvalues()(eig.eigenvalues().size() - 1);
  r.m_hat = r.gramian_min;
  return r;
}

double orthogonality_test(const EigenBasis& basis, const MemoryKernel& kernel, double horizon, double step,
                          std::size_t modes) {
  if (modes == 0) throw std::invalid_argument("orthogonality test: at least one mode");
  const EigenBasis sub = basis.truncated(modes);
  const TimeGrid grid = TimeGrid::with_step(horizon, step);
  const Eigen::MatrixXd B = trace_map(sub, kernel, grid, TraceForm::maccamy_normalized);
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(B).singularValues();
  return std::numbers::sqrt2 * s(s.size() - 1);
}

}  // namespace viscoctrl
