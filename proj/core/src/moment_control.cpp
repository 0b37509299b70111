#include "viscoctrl/moment_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "viscoctrl/errors.hpp"
#include "viscoctrl/parallel.hpp"

namespace viscoctrl {

namespace {

void check_setup(const EigenBasis& basis, double horizon, const TimeGrid& grid, const Eigen::MatrixXd& profiles) {
  if (std::abs(grid.horizon() - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw std::invalid_argument(fmt::format("moment matrix: grid ends at {}, horizon is {}", grid.horizon(), horizon));
  }
  if (profiles.rows() == 0 || static_cast<std::size_t>(profiles.cols()) != basis.node_count()) {
    throw std::invalid_argument("moment matrix: profiles must be P x (boundary node count), P >= 1");
  }
}

MomentMatrix skeleton(DynamicsKind kind, const EigenBasis& basis, const TimeGrid& grid,
                      const Eigen::MatrixXd& profiles) {
  MomentMatrix mm;
  mm.kind = kind;
  mm.grid = grid;
  mm.profiles = profiles;
  mm.profile_gram = profile_gram(basis, profiles);
  mm.lambdas.assign(basis.lambdas().begin(), basis.lambdas().end());
  const auto n = static_cast<Eigen::Index>(basis.mode_count());
  const auto cols = static_cast<Eigen::Index>(grid.size() * mm.profile_count());
  mm.map = Eigen::MatrixXd::Zero(2 * n, cols);
  return mm;
}

// Fills mode m's rows from a unit impulse response (G, G') on the grid.
void fill_rows(MomentMatrix& mm, const EigenBasis& basis, std::size_t m, const std::vector<double>& G,
               const std::vector<double>& dG) {
  const auto w = trapezoid_weights(mm.grid);
  const std::size_t last = mm.grid.intervals;
  const std::size_t P = mm.profile_count();
  const auto N = static_cast<Eigen::Index>(mm.mode_count());
  const double l = mm.lambdas[m];
  for (std::size_t p = 0; p < P; ++p) {
    const Eigen::VectorXd prof = mm.profiles.row(static_cast<Eigen::Index>(p)).transpose();
    const double pair = basis.pairing(m, std::span<const double>(prof.data(), static_cast<std::size_t>(prof.size())));
    for (std::size_t j = 0; j <= last; ++j) {
      const auto col = static_cast<Eigen::Index>(j * P + p);
      const double scale = w[j] * pair;
      mm.map(static_cast<Eigen::Index>(m), col) = scale * dG[last - j] / l;
      mm.map(N + static_cast<Eigen::Index>(m), col) = scale * G[last - j];
    }
  }
}

Eigen::MatrixXd gram_inverse_factor(const MomentMatrix& mm) {
  Eigen::LLT<Eigen::MatrixXd> llt(mm.profile_gram);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("moment matrix: control profiles are linearly dependent on Gamma");
  }
  // L^{-T} with profile_gram = L L^T.
  const Eigen::MatrixXd L = llt.matrixL();
  return L.transpose().triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(mm.profile_gram.rows(), mm.profile_gram.cols()));
}

}  // namespace

MomentMatrix MomentMatrix::truncated(std::size_t modes) const {
  if (modes == 0 || modes > mode_count()) {
    throw std::invalid_argument(fmt::format("moment matrix: cannot truncate {} modes to {}", mode_count(), modes));
  }
  MomentMatrix out = *this;
  const auto N = static_cast<Eigen::Index>(mode_count());
  const auto n = static_cast<Eigen::Index>(modes);
  out.lambdas.resize(modes);
  out.map.resize(2 * n, map.cols());
  out.map.topRows(n) = map.topRows(n);
  out.map.bottomRows(n) = map.middleRows(N, n);
  return out;
}

Eigen::MatrixXd MomentMatrix::physical_map() const {
  if (damping == 0.0) return map;
  const auto N = static_cast<Eigen::Index>(mode_count());
  const std::size_t P = profile_count();
  const std::size_t last = grid.intervals;
  Eigen::MatrixXd out = map;
  for (Eigen::Index n = 0; n < N; ++n) {
    out.row(n) += (0.5 * damping / lambdas[static_cast<std::size_t>(n)]) * map.row(N + n);
  }
  for (std::size_t j = 0; j <= last; ++j) {
    const double e = std::exp(0.5 * damping * grid.at(last - j));
    out.middleCols(static_cast<Eigen::Index>(j * P), static_cast<Eigen::Index>(P)) *= e;
  }
  return out;
}

Eigen::MatrixXd MomentMatrix::orthonormal_map(bool physical) const {
  Eigen::MatrixXd A = physical ? physical_map() : map;
  const Eigen::MatrixXd Linv_t = gram_inverse_factor(*this);
  const auto w = trapezoid_weights(grid);
  const auto P = static_cast<Eigen::Index>(profile_count());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto block = A.middleCols(static_cast<Eigen::Index>(j) * P, P);
    block = (block * Linv_t / std::sqrt(w[j])).eval();
  }
  return A;
}

Eigen::MatrixXd MomentMatrix::amplitudes_from_orthonormal(const Eigen::VectorXd& x) const {
  const auto P = static_cast<Eigen::Index>(profile_count());
  if (x.size() != static_cast<Eigen::Index>(grid.size()) * P) {
    throw std::invalid_argument("moment matrix: coordinate vector has the wrong length");
  }
  const Eigen::MatrixXd Linv_t = gram_inverse_factor(*this);
  const auto w = trapezoid_weights(grid);
  Eigen::MatrixXd amp(static_cast<Eigen::Index>(grid.size()), P);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    amp.row(static_cast<Eigen::Index>(j)) =
        (Linv_t * x.segment(static_cast<Eigen::Index>(j) * P, P) / std::sqrt(w[j])).transpose();
  }
  return amp;
}

Eigen::MatrixXd MomentMatrix::gramian() const {
  const Eigen::MatrixXd A = orthonormal_map(true);
  Eigen::MatrixXd G = A * A.transpose();
  return 0.5 * (G + G.transpose());
}

Eigen::MatrixXcd MomentMatrix::exponential_gramian() const {
  const auto N = static_cast<Eigen::Index>(mode_count());
  const std::complex<double> i(0.0, 1.0);
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  U.topLeftCorner(N, N).setIdentity();
  U.bottomLeftCorner(N, N).setIdentity();
  U.topRightCorner(N, N) = i * Eigen::MatrixXcd::Identity(N, N);
  U.bottomRightCorner(N, N) = -i * Eigen::MatrixXcd::Identity(N, N);
  Eigen::MatrixXcd G = U * gramian().cast<std::complex<double>>() * U.adjoint();
  return 0.5 * (G + G.adjoint());
}

Eigen::VectorXd MomentMatrix::apply(const ControlSignal& control) const {
  if (!control.grid().same_as(grid) || control.profiles().rows() != profiles.rows() ||
      control.profiles().cols() != profiles.cols() ||
      (control.profiles() - profiles).cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument("moment matrix: control grid or profiles differ from the map's");
  }
  const Eigen::MatrixXd at = control.amplitudes().transpose();  // P x nodes, column-major = j*P+p
  const Eigen::Map<const Eigen::VectorXd> x(at.data(), at.size());
  return physical_map() * x;
}

MomentMatrix build_elastic_moment_matrix(const EigenBasis& basis, double horizon, const TimeGrid& grid,
                                         const Eigen::MatrixXd& profiles) {
  check_setup(basis, horizon, grid, profiles);
  MomentMatrix mm = skeleton(DynamicsKind::elastic, basis, grid, profiles);
  parallel_for(basis.mode_count(), [&](std::size_t m) {
    const double l = basis.lambda(m);
    std::vector<double> G(grid.size()), dG(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      G[k] = std::sin(l * grid.at(k)) / l;
      dG[k] = std::cos(l * grid.at(k));
    }
    fill_rows(mm, basis, m, G, dG);
  });
  return mm;
}

MomentMatrix build_viscoelastic_moment_matrix(const EigenBasis& basis, const MemoryKernel& kernel,
                                              double horizon, const TimeGrid& grid,
                                              const Eigen::MatrixXd& profiles) {
  check_setup(basis, horizon, grid, profiles);
  MomentMatrix mm = skeleton(DynamicsKind::viscoelastic, basis, grid, profiles);
  mm.kernel_descriptor = kernel.descriptor();
  const auto resolvent = resolvent_kernel(kernel, grid.step, grid.horizon());
  const auto constants = maccamy_constants(resolvent);
  const auto normalized = without_damping(constants);
  mm.damping = constants.a;
  parallel_for(basis.mode_count(), [&](std::size_t m) {
    const auto v = impulse_response(basis.lambda(m), normalized, grid, m);
    fill_rows(mm, basis, m, v.z, v.zp);
  });
  return mm;
}

Eigen::VectorXd weighted_target(const CoeffState& target_xi, const CoeffState& target_eta,
                                const std::vector<double>& lambdas) {
  if (target_xi.size() != lambdas.size() || target_eta.size() != lambdas.size()) {
    throw std::invalid_argument(fmt::format("target: expected {} coefficients", lambdas.size()));
  }
  if (target_xi.scale != Scale::L2 || target_eta.scale != Scale::Hm1) {
    throw std::invalid_argument("target: displacement must carry scale L2 and velocity scale Hm1");
  }
  const auto xi = target_xi.real_values();
  const auto eta = target_eta.real_values();
  const auto N = static_cast<Eigen::Index>(lambdas.size());
  Eigen::VectorXd b(2 * N);
  for (Eigen::Index n = 0; n < N; ++n) {
    b(n) = eta[static_cast<std::size_t>(n)] / lambdas[static_cast<std::size_t>(n)];
    b(N + n) = xi[static_cast<std::size_t>(n)];
  }
  return b;
}

ControlSolution min_norm_control(const CoeffState& target_xi, const CoeffState& target_eta,
                                 const MomentMatrix& mm, double reg) {
  if (!(reg >= 0.0)) throw std::invalid_argument("min_norm_control: reg must be nonnegative");
  const Eigen::VectorXd b = weighted_target(target_xi, target_eta, mm.lambdas);
  const Eigen::MatrixXd A = mm.orthonormal_map(true);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cut = reg > 0.0 ? reg * smax
                               : std::numeric_limits<double>::epsilon() *
                                     static_cast<double>(std::max(A.rows(), A.cols())) * smax;
  Eigen::VectorXd coef = svd.matrixU().transpose() * b;
  std::size_t rank = 0;
  double smin = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cut && s(k) > 0.0) {
      coef(k) /= s(k);
      ++rank;
      smin = s(k);
    } else {
      coef(k) = 0.0;
    }
  }
  const Eigen::VectorXd x = svd.matrixV() * coef;

  ControlSolution out{ControlSignal(mm.grid, mm.profiles, mm.amplitudes_from_orthonormal(x)), 0.0, 0.0,
                      rank, smax, smin};
  out.residual = (A * x - b).norm();
  out.control_norm = x.norm();
  return out;
}

SteerReport steer_and_verify(const ControlSignal& control, const MemoryKernel& kernel,
                             const EigenBasis& basis, const CoeffState& target_xi,
                             const CoeffState& target_eta, Scheme scheme) {
  const std::vector<double> lambdas(basis.lambdas().begin(), basis.lambdas().end());
  const Eigen::VectorXd target = weighted_target(target_xi, target_eta, lambdas);
  const TimeGrid& grid = control.grid();
  const Eigen::MatrixXd beta = control.modal_forcing(basis);
  const std::vector<double> M = kernel.vanishes() ? std::vector<double>{} : kernel.sample_on(grid);
  const std::size_t N = basis.mode_count();
  const std::size_t last = grid.intervals;

  SteerReport report;
  report.terminal_displacement = CoeffState::zero(N, Scale::L2);
  report.terminal_velocity = CoeffState::zero(N, Scale::Hm1);
  parallel_for(N, [&](std::size_t m) {
    std::vector<double> g(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) g[k] = beta(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    if (!M.empty()) {
      // Boundary data enter the memory form as beta + M*beta.
      const auto mb = trapezoid_convolution(M, g, grid.step);
      for (std::size_t k = 0; k < grid.size(); ++k) g[k] += mb[k];
    }
    const auto tr = solve_modal_memory(basis.lambda(m), kernel, 0.0, 0.0, g, grid, scheme, m);
    report.terminal_displacement.coeffs[m] = tr.z[last];
    report.terminal_velocity.coeffs[m] = tr.zp[last];
  });
  double err2 = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    const double dv = report.terminal_velocity.coeffs[m].real() / lambdas[m] - target(static_cast<Eigen::Index>(m));
    const double dd = report.terminal_displacement.coeffs[m].real() - target(static_cast<Eigen::Index>(N + m));
    err2 += dv * dv + dd * dd;
  }
  report.terminal_error = std::sqrt(err2);
  report.control_norm = control.norm(basis);
  return report;
}

GapSpectrum reachability_gap(const MomentMatrix& mm_e, const MomentMatrix& mm_v, std::size_t fit_first,
                             std::size_t fit_last) {
  if (mm_e.map.rows() != mm_v.map.rows() || mm_e.map.cols() != mm_v.map.cols() || !mm_e.grid.same_as(mm_v.grid)) {
    throw std::invalid_argument("reachability gap: moment matrices differ in shape or grid");
  }
  const Eigen::MatrixXd D = mm_v.orthonormal_map(false) - mm_e.orthonormal_map(false);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(D);
  GapSpectrum out;
  out.sigma = svd.singularValues();
  const double s1 = out.sigma.size() > 0 ? out.sigma(0) : 0.0;
  out.ratios.resize(static_cast<std::size_t>(out.sigma.size()));
  for (Eigen::Index k = 0; k < out.sigma.size(); ++k) {
    out.ratios[static_cast<std::size_t>(k)] = s1 > 0.0 ? out.sigma(k) / s1 : 0.0;
  }
  if (s1 == 0.0) return out;

  if (fit_last == 0) fit_last = mm_e.mode_count();
  fit_last = std::min<std::size_t>(fit_last, static_cast<std::size_t>(out.sigma.size()));
  while (fit_last > fit_first && !(out.sigma(static_cast<Eigen::Index>(fit_last - 1)) > 1e-14 * s1)) --fit_last;
  fit_first = std::max<std::size_t>(fit_first, 1);
  if (fit_last < fit_first + 1) return out;

  // Least squares for log sigma_k = c + p log k.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(fit_last - fit_first + 1);
  for (std::size_t k = fit_first; k <= fit_last; ++k) {
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(out.sigma(static_cast<Eigen::Index>(k - 1)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  out.log_prefactor = (sy - out.exponent * sx) / cnt;
  out.fit_first = fit_first;
  out.fit_last = fit_last;
  return out;
}

}  // namespace viscoctrl
