#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "viscoctrl/errors.hpp"
#include "viscoctrl/kernel_engine.hpp"
#include "viscoctrl/modal_solver.hpp"
#include "viscoctrl/spectral_basis.hpp"

using namespace viscoctrl;
using std::numbers::pi;

namespace {

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Recorded sup of |z| for lambda = 5, b = -0.75, K = 1.125 exp(-1.5 t) on [0, 10].
constexpr double kMacCamyBound = 1.05;

}  // namespace

TEST_CASE("elastic mode is reproduced exactly") {
  const auto grid = TimeGrid::uniform(2.0 * pi, 400);
  for (auto scheme : {Scheme::exponential_trapezoid, Scheme::velocity_verlet}) {
    const auto tr = solve_modal_memory(1.0, MemoryKernel::zero(), 1.0, 0.0, {}, grid, scheme);
    double err = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) err = std::max(err, std::abs(tr.z[j] - std::cos(grid.at(j))));
    const double h = grid.step;
    CHECK(err <= h * h);
    if (scheme == Scheme::exponential_trapezoid) CHECK(err <= 1e-13);
  }
}

TEST_CASE("viscoelastic mode converges at second order to a refined reference") {
  const auto kernel = MemoryKernel::prony({{0.5, 1.0}});
  const double h = 0.02;
  const auto coarse = solve_modal_memory(1.0, kernel, 1.0, 0.0, {}, TimeGrid::uniform(5.0, 250));
  const auto fine = solve_modal_memory(1.0, kernel, 1.0, 0.0, {}, TimeGrid::uniform(5.0, 4000));
  double err = 0.0;
  for (std::size_t j = 0; j < coarse.grid.size(); ++j) err = std::max(err, std::abs(coarse.z[j] - fine.z[16 * j]));
  CHECK(err <= 20.0 * h * h);
  CHECK(err > 0.0);
}

TEST_CASE("memory mode agrees with its scalar closed form") {
  // With M = c e^{-g t}, y = M*w obeys y' = c w - g y, so (w, w', y) solves a
  // linear ODE; its exact flow is the oracle.
  const double lam = 2.0, c = 0.5, g = 1.0, T = 3.0;
  Eigen::Matrix3d A;
  A << 0, 1, 0, -lam * lam, 0, -lam * lam, c, 0, -g;
  Eigen::Vector3d x(1.0, 0.3, 0.0);
  const auto grid = TimeGrid::uniform(T, 1500);
  const auto tr = solve_modal_memory(lam, MemoryKernel::prony({{c, g}}), x(0), x(1), {}, grid);
  // Exact flow by a high-order Taylor series of exp(A T).
  Eigen::Matrix3d E = Eigen::Matrix3d::Identity(), term = Eigen::Matrix3d::Identity();
  const int pieces = 64;
  const Eigen::Matrix3d As = A * (T / pieces);
  for (int k = 1; k < 30; ++k) {
    term = term * As / k;
    E += term;
  }
  Eigen::Matrix3d flow = Eigen::Matrix3d::Identity();
  for (int p = 0; p < pieces; ++p) flow = E * flow;
  const Eigen::Vector3d xe = flow * x;
  const double h = grid.step;
  CHECK(std::abs(tr.z.back() - xe(0)) <= 10.0 * lam * lam * h * h);
  CHECK(std::abs(tr.zp.back() - xe(1)) <= 10.0 * lam * lam * lam * h * h);
}

TEST_CASE("forced elastic mode reproduces sin(lambda t)/lambda for an impulse") {
  // Hat of unit mass at t = 0 on a fine grid approximates the velocity impulse.
  const double lam = 3.0;
  const auto grid = TimeGrid::uniform(2.0, 20000);
  std::vector<double> g(grid.size(), 0.0);
  g[0] = 2.0 / grid.step;
  const auto tr = solve_modal_memory(lam, MemoryKernel::zero(), 0.0, 0.0, g, grid);
  for (std::size_t j = 1000; j < grid.size(); j += 1000) {
    const double t = grid.at(j);
    CHECK(std::abs(tr.z[j] - std::sin(lam * t) / lam) <= 10.0 * grid.step);
  }
  const auto ir = impulse_response(lam, MacCamyConstants{grid, 0.0, 0.0, std::vector<double>(grid.size(), 0.0),
                                                         std::vector<double>(grid.size(), 0.0),
                                                         std::vector<double>(grid.size(), 0.0)},
                                   grid);
  for (std::size_t j = 0; j < grid.size(); j += 997) CHECK(std::abs(ir.z[j] - std::sin(lam * grid.at(j)) / lam) <= 1e-13);
}

TEST_CASE("MacCamy form without memory is the shifted oscillator") {
  const double lam = 2.0, b = 0.75;
  const auto grid = TimeGrid::uniform(4.0, 2000);
  const std::vector<double> K(grid.size(), 0.0);
  const auto tr = solve_modal_maccamy(lam, b, K, 1.0, 0.0, {}, grid);
  const double w = std::sqrt(lam * lam - b);
  double err = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) err = std::max(err, std::abs(tr.z[j] - std::cos(w * grid.at(j))));
  CHECK(err <= 10.0 * grid.step * grid.step);
}

TEST_CASE("the two schemes agree to second order") {
  const auto kernel = MemoryKernel::prony({{0.3, 2.0}});
  std::vector<double> diffs;
  for (std::size_t J : {200, 400, 800}) {
    const auto grid = TimeGrid::uniform(4.0, J);
    const auto a = solve_modal_memory(3.0, kernel, 0.5, 1.0, {}, grid, Scheme::exponential_trapezoid);
    const auto b = solve_modal_memory(3.0, kernel, 0.5, 1.0, {}, grid, Scheme::velocity_verlet);
    double d = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) d = std::max(d, std::abs(a.z[j] - b.z[j]));
    diffs.push_back(d);
  }
  CHECK(diffs[0] / diffs[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(diffs[1] / diffs[2] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("MacCamy solutions stay bounded on a compact interval") {
  const auto grid = TimeGrid::uniform(10.0, 2000);
  std::vector<double> K(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) K[j] = 1.125 * std::exp(-1.5 * grid.at(j));
  const auto tr = solve_modal_maccamy(5.0, -0.75, K, 1.0, 0.0, {}, grid);
  double zmax = 0.0;
  for (double z : tr.z) zmax = std::max(zmax, std::abs(z));
  MESSAGE("max |z| on [0, 10]: " << zmax);
  CHECK(zmax <= kMacCamyBound);
  CHECK(zmax >= 1.0);
}

TEST_CASE("memory and MacCamy forms agree") {
  const auto grid = TimeGrid::uniform(3.0, 1500);
  CHECK(maccamy_equivalence_residual(2.0, MemoryKernel::zero(), 1.0, 0.5, grid) <= 1e-12);
  std::vector<double> r;
  for (std::size_t J : {500, 1000}) {
    r.push_back(maccamy_equivalence_residual(2.0, MemoryKernel::prony({{0.5, 1.0}}), 1.0, 0.5,
                                             TimeGrid::uniform(3.0, J)));
  }
  CHECK(r[0] / r[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("the solution map is linear") {
  const auto kernel = MemoryKernel::prony({{0.4, 1.5}});
  const auto grid = TimeGrid::uniform(2.0, 500);
  std::vector<double> g(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) g[j] = std::cos(3.0 * grid.at(j));
  const auto a = solve_modal_memory(2.5, kernel, 1.0, 0.0, {}, grid);
  const auto b = solve_modal_memory(2.5, kernel, 0.0, 2.0, g, grid);
  std::vector<double> g2(g);
  for (double& v : g2) v *= 3.0;
  const auto c = solve_modal_memory(2.5, kernel, 2.0, 6.0, g2, grid);
  std::vector<double> d(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) d[j] = c.z[j] - 2.0 * a.z[j] - 3.0 * b.z[j];
  CHECK(max_abs(d) <= 1e-12);
}

TEST_CASE("under-resolved modes raise a guard error naming the mode") {
  const auto grid = TimeGrid::uniform(1.0, 10);
  try {
    solve_modal_memory(6.0, MemoryKernel::zero(), 1.0, 0.0, {}, grid, Scheme::exponential_trapezoid, 7);
    FAIL("expected a guard error");
  } catch (const ResolutionGuardError& e) {
    CHECK(e.mode_index() == 7);
    CHECK(e.lambda() == 6.0);
  }
  CHECK_NOTHROW(solve_modal_memory(5.0, MemoryKernel::zero(), 1.0, 0.0, {}, grid));
  CHECK_THROWS_AS(solve_modal_memory(1.0, MemoryKernel::zero(), 1.0, 0.0, std::vector<double>(3, 0.0), grid),
                  std::invalid_argument);
}

TEST_CASE("a single Picard term solves the problem when the perturbation vanishes") {
  const auto grid = TimeGrid::uniform(2.0, 400);
  const MacCamyConstants zero{grid, 0.0, 0.0, std::vector<double>(grid.size(), 0.0),
                              std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
  const auto terms = picard_terms(2.0, zero, 1.0, 1.0, grid, 4);
  REQUIRE(terms.size() == 4);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double t = grid.at(j);
    CHECK(std::abs(terms[0][j] - (std::cos(2 * t) + std::sin(2 * t) / 2)) <= 1e-14);
    CHECK(terms[1][j] == 0.0);
  }
}

TEST_CASE("Picard series converges to the MacCamy solution") {
  const auto kernel = MemoryKernel::prony({{0.5, 1.0}});
  const auto grid = TimeGrid::uniform(1.0, 1000);
  const auto nd = without_damping(maccamy_constants(resolvent_kernel(kernel, grid.step, grid.horizon())));
  const double lam = 3.0;
  const auto terms = picard_terms(lam, nd, 1.0, 0.0, grid, 10);
  const auto direct = solve_modal_maccamy(lam, nd.b, nd.K, 1.0, 0.0, {}, grid);
  double sum = 0.0;
  for (const auto& t : terms) sum += t.back();
  CHECK(std::abs(sum - direct.z.back()) <= 1e-6);
  for (std::size_t k = 2; k < terms.size(); ++k) CHECK(max_abs(terms[k]) <= max_abs(terms[k - 1]));
}

TEST_CASE("elastic boundary response rows match the closed form") {
  const auto basis = interval_basis(6, pi, Endpoint::left);
  const auto grid = TimeGrid::uniform(pi, 500);
  const std::vector<double> profile{1.0};
  const auto rows = boundary_response_kernel(basis, nullptr, profile, grid);
  REQUIRE(rows.size() == 6);
  for (std::size_t n = 0; n < 6; ++n) {
    const double l = basis.lambda(n);
    const double p = basis.trace(n, 0);
    for (std::size_t j = 0; j < grid.size(); j += 25) {
      const double t = grid.at(j);
      CHECK(std::abs(rows[n].z[j] - p * std::sin(l * t) / l) <= 1e-13 * p);
      CHECK(std::abs(rows[n].zp[j] - p * std::cos(l * t)) <= 1e-13 * p);
    }
  }
}

TEST_CASE("viscoelastic boundary rows approach elastic rows relative to the trace at high frequency") {
  const auto basis = interval_basis(40, pi, Endpoint::left);
  const auto grid = TimeGrid::uniform(2.0, 1000);
  const auto mc = maccamy_constants(resolvent_kernel(MemoryKernel::prony({{0.5, 1.0}}), grid.step, grid.horizon()));
  const std::vector<double> profile{1.0};
  const auto ve = boundary_response_kernel(basis, &mc, profile, grid);
  const auto el = boundary_response_kernel(basis, nullptr, profile, grid);
  std::vector<double> rel;
  for (std::size_t n : {0, 4, 9, 19, 39}) {
    double d = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      // Compare the damping-compensated response so only the oscillatory perturbation remains.
      const double t = grid.at(j);
      d = std::max(d, std::abs(ve[n].z[j] * std::exp(-mc.a * t / 2) - el[n].z[j]));
    }
    rel.push_back(d * basis.lambda(n) / basis.trace(n, 0));
  }
  for (std::size_t k = 1; k < rel.size(); ++k) CHECK(rel[k] < rel[k - 1]);
}

TEST_CASE("trajectory CSV layout") {
  const auto grid = TimeGrid::uniform(1.0, 2);
  ModalTrajectory m{grid, {1.0, 0.5, 0.0}, {0.0, -1.0, -2.0}};
  const auto csv = trajectories_to_csv({m, m});
  CHECK(csv.rfind("t,z_1,zp_1,z_2,zp_2\n", 0) == 0);
  CHECK(csv.find("0.5,0.5,-1,0.5,-1\n") != std::string::npos);
}
