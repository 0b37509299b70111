#include "viscoctrl/cosine_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace viscoctrl {

namespace {

using cplx = std::complex<double>;

void require_match(const CoeffState& state, const EigenBasis& basis, const char* what) {
  if (state.size() != basis.mode_count()) {
    throw std::invalid_argument(fmt::format("{}: state has {} coefficients, basis has {} modes", what,
                                            state.size(), basis.mode_count()));
  }
}

// Integer power of i * lambda without accumulating pow() rounding in the phase.
cplx i_lambda_power(double lambda, int k) {
  static const cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int q = ((k % 4) + 4) % 4;
  return phases[q] * std::pow(lambda, k);
}

}  // namespace

CoeffState CoeffState::zero(std::size_t modes, Scale scale) {
  return CoeffState{std::vector<cplx>(modes, cplx{}), scale};
}

CoeffState CoeffState::unit(std::size_t modes, std::size_t index, Scale scale) {
  if (index >= modes) throw std::invalid_argument("unit state: index out of range");
  auto s = zero(modes, scale);
  s.coeffs[index] = 1.0;
  return s;
}

CoeffState CoeffState::from_real(const std::vector<double>& values, Scale scale) {
  CoeffState s{std::vector<cplx>(values.begin(), values.end()), scale};
  return s;
}

double CoeffState::norm(const EigenBasis& basis) const {
  require_match(*this, basis, "norm");
  double s = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const double w = std::pow(basis.lambda(n), order(scale));
    s += w * w * std::norm(coeffs[n]);
  }
  return std::sqrt(s);
}

std::vector<double> CoeffState::real_values(double tol) const {
  double scale_ref = 0.0;
  for (const auto& c : coeffs) scale_ref = std::max(scale_ref, std::abs(c));
  std::vector<double> out(coeffs.size());
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    if (std::abs(coeffs[n].imag()) > tol * scale_ref) {
      throw std::invalid_argument(fmt::format("coefficient {} is not real", n + 1));
    }
    out[n] = coeffs[n].real();
  }
  return out;
}

CoeffState apply_cosine(const CoeffState& state, double t, const EigenBasis& basis) {
  require_match(state, basis, "apply_cosine");
  CoeffState out = state;
  for (std::size_t n = 0; n < out.size(); ++n) out.coeffs[n] *= std::cos(basis.lambda(n) * t);
  return out;
}

CoeffState apply_sine(const CoeffState& state, double t, const EigenBasis& basis) {
  require_match(state, basis, "apply_sine");
  CoeffState out = state;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out.coeffs[n] *= cplx(0.0, std::sin(basis.lambda(n) * t));
  }
  return out;
}

CoeffState apply_calA_power(const CoeffState& state, int k, const EigenBasis& basis) {
  require_match(state, basis, "apply_calA_power");
  CoeffState out = state;
  for (std::size_t n = 0; n < out.size(); ++n) out.coeffs[n] *= i_lambda_power(basis.lambda(n), k);
  out.scale = static_cast<Scale>(order(state.scale) - k);
  return out;
}

ForcingSeries ForcingSeries::zero(const TimeGrid& grid, std::size_t modes) {
  return ForcingSeries{grid, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(modes),
                                                    static_cast<Eigen::Index>(grid.size()))};
}

std::pair<CoeffState, CoeffState> elastic_solution(const CoeffState& u0, const CoeffState& u1,
                                                   const ForcingSeries* forcing,
                                                   const ControlSignal* control, double t,
                                                   const EigenBasis& basis) {
  require_match(u0, basis, "elastic_solution");
  require_match(u1, basis, "elastic_solution");
  if (u0.scale != Scale::H10 && u0.scale != Scale::L2) {
    throw std::invalid_argument("elastic_solution: u0 must carry scale H10 or L2");
  }
  if (order(u1.scale) != order(u0.scale) - 1) {
    throw std::invalid_argument("elastic_solution: u1 must be one scale order below u0");
  }
  const double slack = 1e-12 * std::max(1.0, t);
  std::vector<double> wf;
  if (forcing != nullptr) {
    if (static_cast<std::size_t>(forcing->values.rows()) != basis.mode_count() ||
        static_cast<std::size_t>(forcing->values.cols()) != forcing->grid.size()) {
      throw std::invalid_argument("elastic_solution: forcing shape differs from modes x grid nodes");
    }
    if (forcing->grid.horizon() > t + slack) {
      throw std::invalid_argument("elastic_solution: forcing extends beyond t");
    }
    wf = trapezoid_weights(forcing->grid);
  }
  Eigen::MatrixXd beta;
  std::vector<double> wc;
  if (control != nullptr) {
    if (control->grid().horizon() > t + slack) {
      throw std::invalid_argument("elastic_solution: control extends beyond t");
    }
    beta = control->modal_forcing(basis);
    wc = trapezoid_weights(control->grid());
  }

  CoeffState u = CoeffState::zero(basis.mode_count(), u0.scale);
  CoeffState up = CoeffState::zero(basis.mode_count(), u1.scale);
  for (std::size_t n = 0; n < basis.mode_count(); ++n) {
    const double l = basis.lambda(n);
    cplx val = u0.coeffs[n] * std::cos(l * t) + u1.coeffs[n] * (std::sin(l * t) / l);
    cplx der = -l * u0.coeffs[n] * std::sin(l * t) + u1.coeffs[n] * std::cos(l * t);
    for (std::size_t j = 0; j < wf.size(); ++j) {
      const double tau = t - forcing->grid.at(j);
      const cplx fj = forcing->values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j));
      val += wf[j] * (std::sin(l * tau) / l) * fj;
      der += wf[j] * std::cos(l * tau) * fj;
    }
    if (control != nullptr) {
      for (std::size_t j = 0; j < control->grid().size(); ++j) {
        const double tau = t - control->grid().at(j);
        const double bj = beta(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j));
        val += wc[j] * (std::sin(l * tau) / l) * bj;
        der += wc[j] * std::cos(l * tau) * bj;
      }
    }
    u.coeffs[n] = val;
    up.coeffs[n] = der;
  }
  return {u, up};
}

double check_product_identity(double s, double r, const CoeffState& state, const EigenBasis& basis) {
  const auto lhs = apply_sine(apply_cosine(state, r, basis), s, basis);
  const auto plus = apply_sine(state, s + r, basis);
  const auto minus = apply_sine(state, s - r, basis);
  double worst = 0.0;
  for (std::size_t n = 0; n < state.size(); ++n) {
    worst = std::max(worst, std::abs(lhs.coeffs[n] - 0.5 * (plus.coeffs[n] + minus.coeffs[n])));
  }
  return worst;
}

}  // namespace viscoctrl
