#include "viscoctrl/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "viscoctrl/csv_io.hpp"

namespace viscoctrl {

namespace {

void check_ordering(std::span<const double> lambdas) {
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    if (!(lambdas[n] > 0.0) || !std::isfinite(lambdas[n])) {
      throw std::invalid_argument(fmt::format("eigen basis: lambda_{} = {} is not positive", n + 1, lambdas[n]));
    }
    if (n > 0 && lambdas[n] < lambdas[n - 1]) {
      throw std::invalid_argument(fmt::format(
          "eigen basis: ordering violated, lambda_{} = {} < lambda_{} = {}", n + 1, lambdas[n], n,
          lambdas[n - 1]));
    }
  }
}

}  // namespace

EigenBasis::EigenBasis(int dimension, std::vector<double> lambdas, Eigen::MatrixXd traces,
                       std::vector<double> gamma_weights)
    : dimension_(dimension),
      lambdas_(std::move(lambdas)),
      traces_(std::move(traces)),
      weights_(std::move(gamma_weights)) {
  if (lambdas_.empty()) throw std::invalid_argument("eigen basis: no modes");
  if (weights_.empty()) throw std::invalid_argument("eigen basis: no boundary nodes");
  check_ordering(lambdas_);
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("eigen basis: quadrature weights must be positive");
  }
  if (static_cast<std::size_t>(traces_.rows()) != lambdas_.size() ||
      static_cast<std::size_t>(traces_.cols()) != weights_.size()) {
    throw std::invalid_argument(fmt::format(
        "eigen basis: traces are {}x{}, expected {}x{}", traces_.rows(), traces_.cols(),
        lambdas_.size(), weights_.size()));
  }
  if (!traces_.allFinite()) throw std::invalid_argument("eigen basis: non-finite trace");
}

double EigenBasis::gamma_measure() const noexcept {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double EigenBasis::pairing(std::size_t n, std::span<const double> profile) const {
  if (profile.size() != weights_.size()) {
    throw std::invalid_argument("pairing: profile length differs from boundary node count");
  }
  double s = 0.0;
  for (std::size_t q = 0; q < weights_.size(); ++q) s += weights_[q] * traces_(n, q) * profile[q];
  return s;
}

EigenBasis EigenBasis::truncated(std::size_t count) const {
  if (count == 0 || count > mode_count()) {
    throw std::invalid_argument(fmt::format("eigen basis: cannot truncate {} modes to {}", mode_count(), count));
  }
  return EigenBasis(dimension_, std::vector<double>(lambdas_.begin(), lambdas_.begin() + count),
                    traces_.topRows(count), weights_);
}

EigenBasis interval_basis(std::size_t modes, double length, Endpoint control_end) {
  if (modes == 0) throw std::invalid_argument("interval basis: at least one mode");
  if (!(length > 0.0)) throw std::invalid_argument("interval basis: length must be positive");
  const double pi = std::numbers::pi;
  const double k0 = pi / length;
  const double amp = std::sqrt(2.0 / length);

  std::vector<double> lambdas(modes);
  const std::size_t nodes = control_end == Endpoint::both ? 2 : 1;
  Eigen::MatrixXd traces(modes, nodes);
  for (std::size_t i = 0; i < modes; ++i) {
    const double n = static_cast<double>(i + 1);
    lambdas[i] = n * k0;
    const double left = lambdas[i] * amp;               // phi_n'(0)
    const double right = (i % 2 == 0 ? 1.0 : -1.0) * left;  // -phi_n'(length)
    switch (control_end) {
      case Endpoint::left:
        traces(i, 0) = left;
        break;
      case Endpoint::right:
        traces(i, 0) = right;
        break;
      case Endpoint::both:
        traces(i, 0) = left;
        traces(i, 1) = right;
        break;
    }
  }
  return EigenBasis(1, std::move(lambdas), std::move(traces), std::vector<double>(nodes, 1.0));
}

EigenBasis rectangle_basis(std::size_t nx, std::size_t ny, double lx, double ly,
                           RectangleEdge edge, std::size_t n_quad) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("rectangle basis: at least one mode per axis");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("rectangle basis: side lengths must be positive");
  if (n_quad < 2) throw std::invalid_argument("rectangle basis: at least two boundary nodes");
  const double pi = std::numbers::pi;

  struct Mode {
    double lambda;
    std::size_t m, k;
  };
  std::vector<Mode> list;
  list.reserve(nx * ny);
  for (std::size_t m = 1; m <= nx; ++m) {
    for (std::size_t k = 1; k <= ny; ++k) {
      const double a = static_cast<double>(m) * pi / lx;
      const double b = static_cast<double>(k) * pi / ly;
      list.push_back({std::sqrt(a * a + b * b), m, k});
    }
  }
  std::stable_sort(list.begin(), list.end(), [](const Mode& x, const Mode& y) {
    return std::tie(x.lambda, x.m, x.k) < std::tie(y.lambda, y.m, y.k);
  });

  const bool horizontal = edge == RectangleEdge::bottom || edge == RectangleEdge::top;
  const double edge_length = horizontal ? lx : ly;
  const double dx = edge_length / static_cast<double>(n_quad - 1);
  std::vector<double> weights(n_quad, dx);
  weights.front() *= 0.5;
  weights.back() *= 0.5;

  const double amp = 2.0 / std::sqrt(lx * ly);
  Eigen::MatrixXd traces(list.size(), n_quad);
  std::vector<double> lambdas(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& md = list[i];
    lambdas[i] = md.lambda;
    const double km = static_cast<double>(md.m) * pi / lx;
    const double kk = static_cast<double>(md.k) * pi / ly;
    for (std::size_t q = 0; q < n_quad; ++q) {
      const double s = dx * static_cast<double>(q);
      // Inward normal derivative of amp * sin(km x) sin(kk y) on the edge.
      switch (edge) {
        case RectangleEdge::bottom:
          traces(i, q) = amp * kk * std::sin(km * s);
          break;
        case RectangleEdge::top:
          traces(i, q) = -amp * kk * std::cos(kk * ly) * std::sin(km * s);
          break;
        case RectangleEdge::left:
          traces(i, q) = amp * km * std::sin(kk * s);
          break;
        case RectangleEdge::right:
          traces(i, q) = -amp * km * std::cos(km * lx) * std::sin(kk * s);
          break;
      }
    }
  }
  return EigenBasis(2, std::move(lambdas), std::move(traces), std::move(weights));
}

EigenBasis load_basis_csv(const std::filesystem::path& path) {
  const auto rows = read_numeric_csv(path, /*first_field_label=*/true);
  if (rows.empty() || rows.front().label != "weights") {
    throw IoError(fmt::format("{}: first data row must start with 'weights'", path.string()));
  }
  std::vector<double> weights = rows.front().values;
  std::vector<double> lambdas;
  Eigen::MatrixXd traces(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(weights.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    double lambda = 0.0;
    try {
      lambda = std::stod(row.label);
    } catch (const std::exception&) {
      throw IoError(fmt::format("{}:{}: lambda '{}' is not a number", path.string(), row.line, row.label));
    }
    if (row.values.size() != weights.size()) {
      throw IoError(fmt::format("{}:{}: expected {} trace values, found {}", path.string(), row.line,
                                weights.size(), row.values.size()));
    }
    lambdas.push_back(lambda);
    for (std::size_t q = 0; q < weights.size(); ++q) {
      traces(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(q)) = row.values[q];
    }
  }
  return EigenBasis(0, std::move(lambdas), std::move(traces), std::move(weights));
}

WeylBounds check_weyl_asymptotics(std::span<const double> lambdas, int dimension) {
  if (dimension < 1) throw std::invalid_argument("weyl check: dimension must be >= 1");
  if (lambdas.size() < 10) throw std::invalid_argument("weyl check: at least 10 modes required");
  check_ordering(lambdas);
  const double exponent = 2.0 / static_cast<double>(dimension);
  WeylBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double ratio = lambdas[i] * lambdas[i] / std::pow(static_cast<double>(i + 1), exponent);
    b.lower = std::min(b.lower, ratio);
    b.upper = std::max(b.upper, ratio);
  }
  return b;
}

WeylBounds check_weyl_asymptotics(const EigenBasis& basis, int dimension) {
  return check_weyl_asymptotics(basis.lambdas(), dimension);
}

}  // namespace viscoctrl
