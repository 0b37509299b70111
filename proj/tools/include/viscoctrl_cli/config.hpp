#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "viscoctrl/kernel_engine.hpp"
#include "viscoctrl/modal_solver.hpp"
#include "viscoctrl/spectral_basis.hpp"
#include "viscoctrl/time_grid.hpp"

namespace viscoctrl::cli {

/// Invalid or inconsistent run configuration. Messages carry "line N" when
/// the offending entry can be located.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BasisSpec {
  std::string type = "interval";  // interval | rectangle | file
  std::size_t modes = 10;         // interval modes, or leading modes kept
  double length = 3.141592653589793;
  std::string control_end = "left";
  std::size_t nx = 4, ny = 4;
  double lx = 3.141592653589793, ly = 3.141592653589793;
  std::string edge = "bottom";
  std::size_t n_quad = 33;
  std::filesystem::path path;
};

struct KernelSpec {
  std::string type = "zero";  // zero | prony | sampled
  std::vector<PronyTerm> terms;
  std::filesystem::path path;
};

struct TimeSpec {
  double T = 0.0;
  std::size_t steps = 0;        // intervals on [0, T]
  std::optional<double> T1;     // control horizon, defaults to T
  double step() const { return T / static_cast<double>(steps); }
};

struct ControlSpec {
  std::vector<double> target_displacement{1.0};  // padded with zeros to N
  std::vector<double> target_velocity;
  double reg = 1e-10;
  std::vector<std::vector<double>> profiles;  // empty: one unit profile
};

struct SimulateSpec {
  std::vector<double> initial_displacement;
  std::vector<double> initial_velocity;
  Scheme scheme = Scheme::exponential_trapezoid;
};

struct VerifySpec {
  std::size_t samples = 64;
  std::size_t modes = 0;  // 0: all basis modes
};

struct SweepSpec {
  std::string parameter;  // T | modes | kernel_scale
  std::vector<double> values;
};

struct RunConfig {
  BasisSpec basis;
  KernelSpec kernel;
  TimeSpec time;
  ControlSpec control;
  SimulateSpec simulate;
  VerifySpec verify;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 0;
};

/// Parses a YAML run configuration. Relative paths resolve against
/// base_dir and must exist. Unknown keys are rejected.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration (defaults filled in), stable key order.
nlohmann::ordered_json to_json(const RunConfig& config);

EigenBasis make_basis(const BasisSpec& spec);
MemoryKernel make_kernel(const KernelSpec& spec);

/// Grid of the given horizon with the configured step, rounded up to a whole
/// number of intervals.
TimeGrid grid_for(const TimeSpec& spec, double horizon);

}  // namespace viscoctrl::cli
