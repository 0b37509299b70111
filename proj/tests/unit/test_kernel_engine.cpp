#include <cmath>
#include <vector>

#include <doctest.h>

#include "viscoctrl/errors.hpp"
#include "viscoctrl/kernel_engine.hpp"

using namespace viscoctrl;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("zero kernel has zero resolvent and constants") {
  const auto res = resolvent_kernel(MemoryKernel::zero(), 0.01, 1.0);
  for (double v : res.R) CHECK(v == 0.0);
  const auto mc = maccamy_constants(res);
  CHECK(mc.a == 0.0);
  CHECK(mc.b == 0.0);
  for (double v : mc.K) CHECK(v == 0.0);
  CHECK(mc.vanishes());
  CHECK(verify_resolvent_identity(MemoryKernel::zero(), res) == 0.0);
}

TEST_CASE("single exponential resolvent matches the exponential ansatz") {
  // Oracle: R = c e^{-rt} in R + M*R = M with M = 0.5 e^{-t}:
  // M*R = 0.5 c (e^{-rt} - e^{-t}) / (1 - r) forces c = 0.5 and r = 1.5.
  const double h = 0.01;
  const auto res = resolvent_kernel(MemoryKernel::prony({{0.5, 1.0}}), h, 5.0);
  REQUIRE(res.analytic.has_value());
  CHECK(res.analytic->weight == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(res.analytic->rate == doctest::Approx(1.5).epsilon(1e-15));
  for (std::size_t j = 0; j < res.grid.size(); ++j) {
    CHECK(std::abs(res.R[j] - 0.5 * std::exp(-1.5 * res.grid.at(j))) <= 1e-10);
  }
  CHECK(std::abs(res.a - 0.5) <= 1e-12);
  CHECK(std::abs(res.b + 0.75) <= 1e-12);
  CHECK(std::abs(res.K[0] - 1.125) <= 1e-12);
  for (std::size_t j = 0; j < res.grid.size(); j += 37) {
    CHECK(std::abs(res.K[j] - 1.125 * std::exp(-1.5 * res.grid.at(j))) <= 1e-12);
    CHECK(std::abs(res.dR[j] + 0.75 * std::exp(-1.5 * res.grid.at(j))) <= 1e-12);
  }
}

TEST_CASE("constant kernel resolves to a decaying exponential") {
  // Differentiating R + c*1*R = c gives R' + cR = 0, R(0) = c.
  const double c = 0.3;
  const double h = 0.005;
  const auto res = resolvent_kernel(MemoryKernel::prony({{c, 0.0}}), h, 4.0);
  for (std::size_t j = 0; j < res.grid.size(); ++j) {
    const double t = res.grid.at(j);
    CHECK(std::abs(res.R[j] - c * std::exp(-c * t)) <= 1e-12);
    // Independent check of the identity: c int_0^t c e^{-cs} ds = c (1 - e^{-ct}).
    CHECK(std::abs(res.R[j] + c * (1.0 - std::exp(-c * t)) - c) <= 1e-14);
    CHECK(std::abs(res.marched_R[j] - c * std::exp(-c * t)) <= 2.0 * h * h);
  }
}

TEST_CASE("two-term kernel constants agree with a refined grid") {
  const auto kernel = MemoryKernel::prony({{0.2, 1.0}, {0.1, 2.0}});
  const double h = 0.02;
  const auto coarse = maccamy_constants(resolvent_kernel(kernel, h, 2.0));
  const auto fine = maccamy_constants(resolvent_kernel(kernel, h / 4.0, 2.0));
  CHECK(coarse.a == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(std::abs(coarse.b - fine.b) <= 4.0 * h * h * std::abs(fine.b));
  double kmax = 0.0, kdiff = 0.0;
  for (std::size_t j = 0; j < coarse.K.size(); ++j) {
    kmax = std::max(kmax, std::abs(fine.K[4 * j]));
    kdiff = std::max(kdiff, std::abs(coarse.K[j] - fine.K[4 * j]));
  }
  CHECK(kdiff <= 4.0 * h * h * kmax);
}

TEST_CASE("resolvent identity residual converges at second order for the closed form") {
  const auto kernel = MemoryKernel::prony({{0.5, 1.0}});
  std::vector<double> r;
  for (double h : {0.04, 0.02, 0.01}) {
    auto res = resolvent_kernel(kernel, h, 5.0);
    r.push_back(verify_resolvent_identity(kernel, res));
  }
  CHECK(r[0] / r[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(r[1] / r[2] == doctest::Approx(4.0).epsilon(0.1));
  const double C = r[2] / (0.01 * 0.01);
  CHECK(r[0] <= 1.1 * C * 0.04 * 0.04);
}

TEST_CASE("a corrupted resolvent sample is detected") {
  const auto kernel = MemoryKernel::prony({{0.5, 1.0}});
  auto res = resolvent_kernel(kernel, 0.01, 5.0);
  res.R[100] += 0.01;
  CHECK(verify_resolvent_identity(kernel, res) >= 0.005);
}

TEST_CASE("marched resolvent satisfies both resolvent identities to roundoff") {
  const auto kernel = MemoryKernel::prony({{0.2, 1.0}, {-0.1, 3.0}});
  const auto res = resolvent_kernel(kernel, 0.01, 3.0);
  CHECK_FALSE(res.analytic.has_value());
  CHECK(res.residual <= 1e-12);
  CHECK(res.residual <= res.residual_tolerance);
}

TEST_CASE("marched resolvent error is second order against the closed form") {
  const auto kernel = MemoryKernel::prony({{0.5, 1.0}});
  std::vector<double> err;
  for (double h : {0.02, 0.01}) {
    const auto res = resolvent_kernel(kernel, h, 5.0);
    err.push_back(max_abs_diff(res.marched_R, res.R));
  }
  const double ratio = err[0] / err[1];
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("sampled kernels resolve like their analytic source") {
  const double h = 0.01;
  std::vector<double> samples(601);
  for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = 0.5 * std::exp(-static_cast<double>(j) * h);
  const auto res = resolvent_kernel(MemoryKernel::sampled(samples, h), h, 5.0);
  double err = 0.0;
  for (std::size_t j = 0; j < res.grid.size(); ++j) err = std::max(err, std::abs(res.R[j] - 0.5 * std::exp(-1.5 * res.grid.at(j))));
  CHECK(err <= 5.0 * h * h);
  const auto mc = maccamy_constants(res);
  CHECK(mc.a == doctest::Approx(0.5));
  CHECK(std::abs(mc.b + 0.75) <= 10.0 * h * h);
}

TEST_CASE("sampled kernels on coarser integer-stride grids") {
  std::vector<double> samples(201);
  for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = std::cos(0.01 * static_cast<double>(j));
  const auto k = MemoryKernel::sampled(samples, 0.01);
  const auto on = k.sample_on(TimeGrid::uniform(2.0, 100));
  CHECK(on[50] == samples[100]);
  CHECK_THROWS_AS(k.sample_on(TimeGrid::uniform(2.0, 300)), std::invalid_argument);
  CHECK_THROWS_AS(k.sample_on(TimeGrid::uniform(4.0, 200)), std::invalid_argument);
}

TEST_CASE("kernel and resolvent preconditions") {
  CHECK_THROWS_AS(MemoryKernel::sampled({1.0, 2.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::sampled({1.0, 2.0, 3.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::prony({{1.0, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MemoryKernel::prony({{NAN, 1.0}}), std::invalid_argument);
  CHECK(MemoryKernel::prony({}).form() == MemoryKernel::Form::zero);

  const auto k = MemoryKernel::prony({{0.5, 200.0}});
  CHECK_THROWS_AS(resolvent_kernel(k, 0.01, 1.0), NumericalGuardError);
  CHECK_THROWS_AS(resolvent_kernel(MemoryKernel::zero(), 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(resolvent_kernel(MemoryKernel::zero(), 0.0, 1.0), std::invalid_argument);

  CHECK_THROWS_AS(resolvent_kernel(MemoryKernel::zero(), 0.1, 0.3), std::invalid_argument);
  auto short_data = resolvent_kernel(MemoryKernel::zero(), 0.1, 1.0);
  short_data.grid = TimeGrid::uniform(0.3, 3);
  short_data.R.resize(4);
  CHECK_THROWS_AS(maccamy_constants(short_data), std::invalid_argument);
}

TEST_CASE("removing the damping term") {
  const auto mc = maccamy_constants(resolvent_kernel(MemoryKernel::prony({{0.5, 1.0}}), 0.01, 2.0));
  const auto nd = without_damping(mc);
  CHECK(nd.a == 0.0);
  CHECK(nd.b == doctest::Approx(-0.75 + 0.0625));
  // K e^{-at/2} = 1.125 e^{-1.75 t}.
  for (std::size_t j = 0; j < nd.K.size(); j += 20) {
    CHECK(nd.K[j] == doctest::Approx(1.125 * std::exp(-1.75 * nd.grid.at(j))).epsilon(1e-13));
  }
}

TEST_CASE("kernel descriptors and scaling") {
  CHECK(MemoryKernel::zero().descriptor() == "zero");
  CHECK(MemoryKernel::prony({{0.5, 1.0}}).descriptor() == "prony[0.5*exp(-1*t)]");
  const auto s = MemoryKernel::prony({{0.5, 1.0}}).scaled(2.0);
  CHECK(s.value(0.0) == doctest::Approx(1.0));
  CHECK(MemoryKernel::prony({{0.0, 1.0}}).vanishes());
}
