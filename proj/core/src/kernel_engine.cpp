#include "viscoctrl/kernel_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "viscoctrl/errors.hpp"

namespace viscoctrl {

MemoryKernel MemoryKernel::zero() { return MemoryKernel{}; }

MemoryKernel MemoryKernel::prony(std::vector<PronyTerm> terms) {
  for (const auto& t : terms) {
    if (!std::isfinite(t.weight) || !std::isfinite(t.rate)) {
      throw std::invalid_argument("prony kernel: weights and rates must be finite");
    }
    if (t.rate < 0.0) {
      throw std::invalid_argument("prony kernel: rates must be nonnegative");
    }
  }
  MemoryKernel k;
  k.form_ = terms.empty() ? Form::zero : Form::prony;
  k.terms_ = std::move(terms);
  return k;
}

MemoryKernel MemoryKernel::sampled(std::vector<double> values, double step) {
  if (values.size() < 3) {
    throw std::invalid_argument("sampled kernel: at least 3 samples required");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("sampled kernel: step must be positive");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sampled kernel: non-finite sample");
  }
  MemoryKernel k;
  k.form_ = Form::sampled;
  k.samples_ = std::move(values);
  k.sample_step_ = step;
  return k;
}

bool MemoryKernel::vanishes() const noexcept {
  switch (form_) {
    case Form::zero:
      return true;
    case Form::prony:
      return std::all_of(terms_.begin(), terms_.end(), [](const PronyTerm& t) { return t.weight == 0.0; });
    case Form::sampled:
      return std::all_of(samples_.begin(), samples_.end(), [](double v) { return v == 0.0; });
  }
  return true;
}

double MemoryKernel::max_rate() const noexcept {
  double r = 0.0;
  for (const auto& t : terms_) r = std::max(r, t.rate);
  return r;
}

double MemoryKernel::value(double t) const {
  switch (form_) {
    case Form::zero:
      return 0.0;
    case Form::prony: {
      double v = 0.0;
      for (const auto& term : terms_) v += term.weight * std::exp(-term.rate * t);
      return v;
    }
    case Form::sampled: {
      const double idx = t / sample_step_;
      const double rounded = std::round(idx);
      if (std::abs(idx - rounded) > 1e-9 || rounded < 0.0 ||
          rounded >= static_cast<double>(samples_.size())) {
        throw std::invalid_argument("sampled kernel: time is not a sample node");
      }
      return samples_[static_cast<std::size_t>(rounded)];
    }
  }
  return 0.0;
}

std::vector<double> MemoryKernel::sample_on(const TimeGrid& grid) const {
  std::vector<double> out(grid.size(), 0.0);
  switch (form_) {
    case Form::zero:
      break;
    case Form::prony:
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = value(grid.at(j));
      break;
    case Form::sampled: {
      const double ratio = grid.step / sample_step_;
      const double stride = std::round(ratio);
      if (stride < 1.0 || std::abs(ratio - stride) > 1e-9 * ratio) {
        throw std::invalid_argument(fmt::format(
            "sampled kernel: grid step {} is not an integer multiple of sample step {}", grid.step,
            sample_step_));
      }
      const auto s = static_cast<std::size_t>(stride);
      if ((out.size() - 1) * s >= samples_.size()) {
        throw std::invalid_argument(
            fmt::format("sampled kernel: samples cover [0, {}] but grid extends to {}",
                        sample_step_ * static_cast<double>(samples_.size() - 1), grid.horizon()));
      }
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = samples_[j * s];
      break;
    }
  }
  return out;
}

MemoryKernel MemoryKernel::scaled(double factor) const {
  MemoryKernel k = *this;
  for (auto& t : k.terms_) t.weight *= factor;
  for (auto& v : k.samples_) v *= factor;
  return k;
}

std::string MemoryKernel::descriptor() const {
  switch (form_) {
    case Form::zero:
      return "zero";
    case Form::prony: {
      std::string s = "prony[";
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) s += " + ";
        s += fmt::format("{}*exp(-{}*t)", terms_[i].weight, terms_[i].rate);
      }
      return s + "]";
    }
    case Form::sampled:
      return fmt::format("sampled[n={}, h={}]", samples_.size(), sample_step_);
  }
  return "unknown";
}

namespace {

std::vector<double> march_resolvent(std::span<const double> m, double h) {
  std::vector<double> r(m.size(), 0.0);
  if (m.empty()) return r;
  r[0] = m[0];
  const double diag = 1.0 + 0.5 * h * m[0];
  for (std::size_t k = 1; k < m.size(); ++k) {
    double hist = 0.5 * m[k] * r[0];
    for (std::size_t j = 1; j < k; ++j) hist += m[k - j] * r[j];
    r[k] = (m[k] - h * hist) / diag;
  }
  return r;
}

// Second-order first and second differences, one-sided at the ends.
std::vector<double> first_difference(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> second_difference(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  const double h2 = h * h;
  std::vector<double> d(n);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return d;
}

double identity_residual(std::span<const double> m, std::span<const double> r, double h) {
  double worst = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double mr = trapezoid_convolution_at(m, r, k, h);
    const double rm = trapezoid_convolution_at(r, m, k, h);
    worst = std::max(worst, std::abs(r[k] + mr - m[k]));
    worst = std::max(worst, std::abs(m[k] - r[k] - rm));
  }
  return worst;
}

}  // namespace

ResolventData resolvent_kernel(const MemoryKernel& kernel, double step, double horizon) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("resolvent: step must be positive");
  }
  if (!(horizon >= 2.0 * step)) {
    throw std::invalid_argument("resolvent: horizon must cover at least two steps");
  }
  if (kernel.max_rate() * step > 1.0) {
    throw NumericalGuardError(fmt::format(
        "resolvent: kernel under-resolved (max rate {} times step {} exceeds 1)",
        kernel.max_rate(), step));
  }
  const auto intervals = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
  ResolventData out;
  out.grid = TimeGrid{step, intervals};
  const std::vector<double> m = kernel.sample_on(out.grid);

  out.marched_R = march_resolvent(m, step);
  if (kernel.vanishes()) {
    out.analytic = PronyTerm{0.0, 0.0};
  } else if (kernel.form() == MemoryKernel::Form::prony && kernel.terms().size() == 1) {
    // c exp(-g t): Laplace transform c/(s+g), resolvent c/(s+g+c).
    const auto t = kernel.terms()[0];
    out.analytic = PronyTerm{t.weight, t.rate + t.weight};
  }
  if (out.analytic) {
    out.R.resize(out.grid.size());
    for (std::size_t j = 0; j < out.R.size(); ++j) {
      out.R[j] = out.analytic->weight * std::exp(-out.analytic->rate * out.grid.at(j));
    }
  } else {
    out.R = out.marched_R;
  }

  const double m_sup = std::abs(*std::max_element(m.begin(), m.end(), [](double x, double y) {
    return std::abs(x) < std::abs(y);
  }));
  if (out.analytic) {
    // Trapezoid error bound for int_0^t M(t-s) R(s) ds with M = c e^{-gt},
    // R = c e^{-(g+c)t}: the integrand is c^2 e^{-gt} e^{-cs}.
    const double c = kernel.vanishes() ? 0.0 : kernel.terms()[0].weight;
    out.residual_tolerance = 1e-8 + horizon * step * step * std::pow(c, 4) / 12.0 *
                                        std::max(1.0, std::exp(-c * horizon));
  } else {
    // The marched samples solve the discrete equation exactly; only roundoff.
    out.residual_tolerance =
        1e-13 * static_cast<double>(out.grid.size()) * std::max(1.0, m_sup) * std::max(1.0, m_sup * horizon);
  }
  out.residual = identity_residual(m, out.R, step);
  if (!(out.residual <= out.residual_tolerance)) {
    throw NumericalGuardError(fmt::format("resolvent: residual {} exceeds tolerance {}",
                                          out.residual, out.residual_tolerance));
  }

  const MacCamyConstants mc = maccamy_constants(out);
  out.a = mc.a;
  out.b = mc.b;
  out.dR = mc.dR;
  out.K = mc.K;
  return out;
}

bool MacCamyConstants::vanishes() const noexcept {
  return a == 0.0 && b == 0.0 && std::all_of(K.begin(), K.end(), [](double v) { return v == 0.0; });
}

MacCamyConstants maccamy_constants(const ResolventData& resolvent) {
  const std::size_t n = resolvent.R.size();
  if (n < 5) {
    throw std::invalid_argument("maccamy constants: at least 5 grid nodes required");
  }
  MacCamyConstants mc;
  mc.grid = resolvent.grid;
  mc.R = resolvent.R;
  if (resolvent.analytic) {
    const double c = resolvent.analytic->weight;
    const double r = resolvent.analytic->rate;
    mc.dR.resize(n);
    mc.K.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double e = c * std::exp(-r * resolvent.grid.at(j));
      mc.dR[j] = -r * e;
      mc.K[j] = r * r * e;
    }
    mc.a = c;
    mc.b = -r * c;
  } else {
    const double h = resolvent.grid.step;
    mc.dR = first_difference(resolvent.R, h);
    mc.K = second_difference(resolvent.R, h);
    mc.a = resolvent.R[0];
    mc.b = mc.dR[0];
  }
  return mc;
}

MacCamyConstants without_damping(const MacCamyConstants& constants) {
  MacCamyConstants out = constants;
  const double half_a = 0.5 * constants.a;
  out.a = 0.0;
  out.b = constants.b + half_a * half_a;
  for (std::size_t j = 0; j < out.K.size(); ++j) {
    out.K[j] = std::exp(-half_a * constants.grid.at(j)) * constants.K[j];
  }
  return out;
}

double verify_resolvent_identity(const MemoryKernel& kernel, const ResolventData& resolvent) {
  if (resolvent.R.size() != resolvent.grid.size()) {
    throw std::invalid_argument("resolvent identity: samples do not match the grid");
  }
  const std::vector<double> m = kernel.sample_on(resolvent.grid);
  return identity_residual(m, resolvent.R, resolvent.grid.step);
}

}  // namespace viscoctrl
