#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <doctest.h>

#include "viscoctrl/cosine_algebra.hpp"
#include "viscoctrl/spectral_basis.hpp"

using namespace viscoctrl;
using std::numbers::pi;
using cd = std::complex<double>;

namespace {

CoeffState random_state(std::size_t n, Scale s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CoeffState st = CoeffState::zero(n, s);
  for (auto& c : st.coeffs) c = {g(rng), g(rng)};
  return st;
}

double max_diff(const CoeffState& a, const CoeffState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
  return m;
}

}  // namespace

TEST_CASE("cosine family at zero is the identity and sine vanishes") {
  const auto b = interval_basis(12, pi, Endpoint::left);
  const auto s = random_state(12, Scale::L2, 3);
  CHECK(max_diff(apply_cosine(s, 0.0, b), s) == 0.0);
  CHECK(apply_sine(s, 0.0, b).norm(b) == 0.0);
}

TEST_CASE("cosine and sine of single modes") {
  const auto b = interval_basis(2, pi, Endpoint::left);
  const auto e1 = CoeffState::unit(2, 0, Scale::L2);
  CHECK(std::abs(apply_cosine(e1, pi, b).coeffs[0] - cd(-1.0, 0.0)) <= 1e-15);
  const auto e2 = CoeffState::unit(2, 1, Scale::L2);
  CHECK(std::abs(apply_sine(e2, pi / 4.0, b).coeffs[1] - cd(0.0, 1.0)) <= 1e-15);
}

TEST_CASE("cosine and sine act elementwise") {
  const auto b = rectangle_basis(4, 4, 1.3, 0.7, RectangleEdge::left, 5);
  const auto s = random_state(b.mode_count(), Scale::H10, 9);
  const double t = 0.83;
  const auto c = apply_cosine(s, t, b);
  const auto si = apply_sine(s, t, b);
  CHECK(c.scale == Scale::H10);
  for (std::size_t n = 0; n < s.size(); ++n) {
    const double l = b.lambda(n);
    CHECK(std::abs(c.coeffs[n] - s.coeffs[n] * std::cos(l * t)) <= 1e-15 * std::abs(s.coeffs[n]) + 1e-300);
    CHECK(std::abs(si.coeffs[n] - cd(0, 1) * s.coeffs[n] * std::sin(l * t)) <= 1e-15 * std::abs(s.coeffs[n]) + 1e-300);
    // cos^2 + (sin/i)^2 = 1 pointwise.
    const cd sum = c.coeffs[n] * c.coeffs[n] - si.coeffs[n] * si.coeffs[n];
    CHECK(std::abs(sum - s.coeffs[n] * s.coeffs[n]) <= 1e-13 * std::norm(s.coeffs[n]));
  }
}

TEST_CASE("powers of the generator") {
  const auto b = interval_basis(5, pi, Endpoint::left);
  const auto s = random_state(5, Scale::L2, 5);
  const auto sq = apply_calA_power(s, 2, b);
  CHECK(order(sq.scale) == -2);
  for (std::size_t n = 0; n < 5; ++n) {
    const double l = b.lambda(n);
    CHECK(std::abs(sq.coeffs[n] + l * l * s.coeffs[n]) <= 1e-13 * l * l * std::abs(s.coeffs[n]));
  }
  const auto back = apply_calA_power(apply_calA_power(s, 1, b), -1, b);
  CHECK(back.scale == Scale::L2);
  CHECK(max_diff(back, s) <= 1e-14);
  const auto one = apply_calA_power(CoeffState::unit(5, 2, Scale::H10), 1, b);
  CHECK(one.scale == Scale::L2);
  CHECK(std::abs(one.coeffs[2] - cd(0, 3)) <= 1e-15);
}

TEST_CASE("product identity holds to roundoff") {
  const auto b = rectangle_basis(6, 6, pi, pi, RectangleEdge::bottom, 3);
  const auto s = random_state(b.mode_count(), Scale::L2, 17);
  for (double t : {0.0, 0.4, 2.2}) {
    for (double r : {0.0, 1.1, 5.3}) CHECK(check_product_identity(t, r, s, b) <= 1e-12);
  }
}

TEST_CASE("cosine and sine commute with each other and with powers") {
  const auto b = interval_basis(8, 2.0, Endpoint::left);
  const auto s = random_state(8, Scale::L2, 23);
  const auto cs = apply_cosine(apply_sine(s, 0.7, b), 1.9, b);
  const auto sc = apply_sine(apply_cosine(s, 1.9, b), 0.7, b);
  CHECK(max_diff(cs, sc) <= 1e-14);
  const auto ac = apply_calA_power(apply_cosine(s, 1.3, b), 1, b);
  const auto ca = apply_cosine(apply_calA_power(s, 1, b), 1.3, b);
  CHECK(max_diff(ac, ca) <= 1e-13);
}

TEST_CASE("elastic solution of homogeneous data") {
  const auto b = interval_basis(1, pi, Endpoint::left);
  const auto u0 = CoeffState::unit(1, 0, Scale::H10);
  const auto u1 = CoeffState::zero(1, Scale::L2);
  for (double t : {0.0, 0.3, 1.7, 3.0}) {
    const auto [u, up] = elastic_solution(u0, u1, nullptr, nullptr, t, b);
    CHECK(std::abs(u.coeffs[0] - std::cos(t)) <= 1e-15);
    CHECK(std::abs(up.coeffs[0] + std::sin(t)) <= 1e-15);
  }
}

TEST_CASE("elastic energy is conserved") {
  const auto b = interval_basis(30, 1.0, Endpoint::left);
  auto u0 = CoeffState::from_real(std::vector<double>(30, 0.0), Scale::H10);
  auto u1 = CoeffState::from_real(std::vector<double>(30, 0.0), Scale::L2);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  for (std::size_t n = 0; n < 30; ++n) {
    u0.coeffs[n] = g(rng) / b.lambda(n);
    u1.coeffs[n] = g(rng);
  }
  const double e0 = std::pow(u0.norm(b), 2) + std::pow(u1.norm(b), 2);
  for (double t : {0.5, 3.0, 11.0}) {
    const auto [u, up] = elastic_solution(u0, u1, nullptr, nullptr, t, b);
    CHECK(u.scale == Scale::H10);
    CHECK(up.scale == Scale::L2);
    const double e = std::pow(u.norm(b), 2) + std::pow(up.norm(b), 2);
    CHECK(std::abs(e - e0) <= 1e-12 * e0);
  }
}

TEST_CASE("elastic solution with a boundary input reproduces the Duhamel integral") {
  // Basis (0, pi), f(t) = sin t at x = 0: trace_1 = sqrt(2/pi) and
  // u_1(1) = int_0^1 sin(1 - s) sqrt(2/pi) sin s ds = sqrt(2/pi) (sin 1 - cos 1) / 2.
  const auto b = interval_basis(1, pi, Endpoint::left);
  const std::size_t J = 2000;
  const auto grid = TimeGrid::uniform(1.0, J);
  Eigen::MatrixXd amp(grid.size(), 1);
  for (std::size_t j = 0; j < grid.size(); ++j) amp(j, 0) = std::sin(grid.at(j));
  const ControlSignal f(grid, Eigen::MatrixXd::Ones(1, 1), amp);
  const auto [u, up] = elastic_solution(CoeffState::zero(1, Scale::L2), CoeffState::zero(1, Scale::Hm1),
                                        nullptr, &f, 1.0, b);
  const double exact = std::sqrt(2.0 / pi) * (std::sin(1.0) - std::cos(1.0)) / 2.0;
  const double h = grid.step;
  CHECK(std::abs(u.coeffs[0].real() - exact) <= h * h);
  // Derivative: int_0^1 cos(1-s) sqrt(2/pi) sin s ds = sqrt(2/pi) sin(1) / 2.
  CHECK(std::abs(up.coeffs[0].real() - std::sqrt(2.0 / pi) * std::sin(1.0) / 2.0) <= h * h);
}

TEST_CASE("interior forcing enters like the boundary input") {
  const auto b = interval_basis(3, pi, Endpoint::left);
  const auto grid = TimeGrid::uniform(1.0, 1000);
  auto F = ForcingSeries::zero(grid, 3);
  for (std::size_t j = 0; j < grid.size(); ++j) F.values(1, j) = 1.0;
  const auto [u, up] = elastic_solution(CoeffState::zero(3, Scale::L2), CoeffState::zero(3, Scale::Hm1),
                                        &F, nullptr, 1.0, b);
  // int_0^1 sin(2(1-s))/2 ds = (1 - cos 2) / 4.
  CHECK(std::abs(u.coeffs[1].real() - (1.0 - std::cos(2.0)) / 4.0) <= 1e-6);
  CHECK(u.coeffs[0] == cd(0.0, 0.0));
}

TEST_CASE("scale tags and horizons are checked") {
  const auto b = interval_basis(2, pi, Endpoint::left);
  const auto good0 = CoeffState::zero(2, Scale::H10);
  const auto bad1 = CoeffState::zero(2, Scale::H10);
  CHECK_THROWS_AS(elastic_solution(good0, bad1, nullptr, nullptr, 1.0, b), std::invalid_argument);
  CHECK_THROWS_AS(elastic_solution(CoeffState::zero(3, Scale::H10), CoeffState::zero(3, Scale::L2),
                                   nullptr, nullptr, 1.0, b),
                  std::invalid_argument);
  const auto grid = TimeGrid::uniform(2.0, 10);
  const auto f = ControlSignal::zero(grid, Eigen::MatrixXd::Ones(1, 1));
  CHECK_THROWS_AS(elastic_solution(CoeffState::zero(2, Scale::L2), CoeffState::zero(2, Scale::Hm1),
                                   nullptr, &f, 1.0, b),
                  std::invalid_argument);
  auto complex_state = CoeffState::zero(2, Scale::L2);
  complex_state.coeffs[0] = {1.0, 0.5};
  CHECK_THROWS(complex_state.real_values(1e-12));
}
