#include "viscoctrl_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "viscoctrl/csv_io.hpp"

namespace viscoctrl::cli {

namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.is_null()) return "config";
  return fmt::format("config line {}", mark.line + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& msg) {
  throw ConfigError(fmt::format("{}: {}", where(node), msg));
}

// A mapping block with a closed key set.
class Block {
 public:
  Block(YAML::Node node, std::string name, std::set<std::string> allowed)
      : node_(std::move(node)), name_(std::move(name)) {
    if (!node_.IsMap()) fail(node_, fmt::format("'{}' must be a mapping", name_));
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, fmt::format("unknown key '{}' in '{}'", key, name_));
    }
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
  YAML::Node at(const std::string& key) const { return node_[key]; }

  template <class T>
  T get(const std::string& key, T fallback) const {
    const auto n = node_[key];
    if (!n) return fallback;
    return convert<T>(n, key);
  }

  template <class T>
  T require(const std::string& key) const {
    const auto n = node_[key];
    if (!n) fail(node_, fmt::format("'{}' requires key '{}'", name_, key));
    return convert<T>(n, key);
  }

  const YAML::Node& node() const { return node_; }

 private:
  template <class T>
  T convert(const YAML::Node& n, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        const auto text = n.as<std::string>();
        if (!text.empty() && text.front() == '-') throw YAML::BadConversion(n.Mark());
      }
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, fmt::format("'{}.{}' has the wrong type", name_, key));
    }
  }

  YAML::Node node_;
  std::string name_;
};

std::vector<double> number_list(const YAML::Node& n, const std::string& what) {
  if (!n) return {};
  if (!n.IsSequence()) fail(n, fmt::format("'{}' must be a list of numbers", what));
  std::vector<double> out;
  for (const auto& v : n) {
    try {
      out.push_back(v.as<double>());
    } catch (const YAML::Exception&) {
      fail(v, fmt::format("'{}' must contain numbers only", what));
    }
    if (!std::isfinite(out.back())) fail(v, fmt::format("'{}' contains a non-finite value", what));
  }
  return out;
}

std::filesystem::path existing_path(const YAML::Node& n, const std::filesystem::path& base) {
  std::filesystem::path p = n.as<std::string>();
  if (p.is_relative()) p = base / p;
  if (!std::filesystem::exists(p)) fail(n, fmt::format("file '{}' does not exist", p.string()));
  return p;
}

void expect_choice(const YAML::Node& n, const std::string& value, std::initializer_list<const char*> choices) {
  for (const char* c : choices) {
    if (value == c) return;
  }
  std::string list;
  for (const char* c : choices) list += (list.empty() ? "" : " | ") + std::string(c);
  fail(n, fmt::format("'{}' is not one of {}", value, list));
}

BasisSpec parse_basis(const YAML::Node& node, const std::filesystem::path& base) {
  Block b(node, "basis",
          {"type", "modes", "length", "control_end", "nx", "ny", "lx", "ly", "edge", "n_quad", "path"});
  BasisSpec s;
  s.type = b.require<std::string>("type");
  expect_choice(b.at("type"), s.type, {"interval", "rectangle", "file"});
  s.modes = b.get<std::size_t>("modes", 0);
  if (s.type == "interval") {
    if (s.modes == 0) fail(node, "interval basis requires 'modes' >= 1");
    s.length = b.get<double>("length", s.length);
    s.control_end = b.get<std::string>("control_end", s.control_end);
    if (b.has("control_end")) expect_choice(b.at("control_end"), s.control_end, {"left", "right", "both"});
  } else if (s.type == "rectangle") {
    s.nx = b.get<std::size_t>("nx", s.nx);
    s.ny = b.get<std::size_t>("ny", s.ny);
    s.lx = b.get<double>("lx", s.lx);
    s.ly = b.get<double>("ly", s.ly);
    s.edge = b.get<std::string>("edge", s.edge);
    if (b.has("edge")) expect_choice(b.at("edge"), s.edge, {"bottom", "top", "left", "right"});
    s.n_quad = b.get<std::size_t>("n_quad", s.n_quad);
  } else {
    if (!b.has("path")) fail(node, "file basis requires 'path'");
    s.path = existing_path(b.at("path"), base);
  }
  return s;
}

KernelSpec parse_kernel(const YAML::Node& node, const std::filesystem::path& base) {
  Block b(node, "kernel", {"type", "terms", "path"});
  KernelSpec s;
  s.type = b.require<std::string>("type");
  expect_choice(b.at("type"), s.type, {"zero", "prony", "sampled"});
  if (s.type == "prony") {
    const auto terms = b.at("terms");
    if (!terms || !terms.IsSequence()) fail(node, "prony kernel requires 'terms' as a list of [weight, rate]");
    for (const auto& t : terms) {
      const auto pair = number_list(t, "kernel.terms entry");
      if (pair.size() != 2) fail(t, "each prony term must be [weight, rate]");
      if (pair[1] < 0.0) fail(t, "prony rates must be nonnegative");
      s.terms.push_back({pair[0], pair[1]});
    }
  } else if (s.type == "sampled") {
    if (!b.has("path")) fail(node, "sampled kernel requires 'path'");
    s.path = existing_path(b.at("path"), base);
  } else if (b.has("terms") || b.has("path")) {
    fail(node, "zero kernel takes no 'terms' or 'path'");
  }
  return s;
}

TimeSpec parse_time(const YAML::Node& node) {
  Block b(node, "time", {"T", "steps", "h", "T1"});
  TimeSpec s;
  s.T = b.require<double>("T");
  if (!(s.T > 0.0) || !std::isfinite(s.T)) fail(b.at("T"), "'time.T' must be positive");
  if (b.has("steps") == b.has("h")) fail(node, "'time' needs exactly one of 'steps' or 'h'");
  if (b.has("steps")) {
    s.steps = b.require<std::size_t>("steps");
    if (s.steps < 2) fail(b.at("steps"), "'time.steps' must be at least 2");
  } else {
    const double h = b.require<double>("h");
    if (!(h > 0.0)) fail(b.at("h"), "'time.h' must be positive");
    try {
      s.steps = TimeGrid::with_step(s.T, h).intervals;
    } catch (const std::invalid_argument&) {
      fail(b.at("h"), fmt::format("'time.h' = {} does not divide T = {} to 1e-12", h, s.T));
    }
  }
  if (b.has("T1")) {
    s.T1 = b.require<double>("T1");
    if (!(*s.T1 > 0.0)) fail(b.at("T1"), "'time.T1' must be positive");
  }
  return s;
}

Scheme parse_scheme(const YAML::Node& n) {
  const auto v = n.as<std::string>();
  expect_choice(n, v, {"exponential_trapezoid", "velocity_verlet"});
  return v == "velocity_verlet" ? Scheme::velocity_verlet : Scheme::exponential_trapezoid;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
  Block top(root, "config", {"seed", "basis", "kernel", "time", "control", "simulate", "verify", "sweep"});

  RunConfig c;
  c.seed = top.get<std::uint64_t>("seed", 0);
  if (!top.has("basis")) throw ConfigError("config: missing 'basis' block");
  if (!top.has("kernel")) throw ConfigError("config: missing 'kernel' block");
  if (!top.has("time")) throw ConfigError("config: missing 'time' block");
  c.basis = parse_basis(top.at("basis"), base_dir);
  c.kernel = parse_kernel(top.at("kernel"), base_dir);
  c.time = parse_time(top.at("time"));

  EigenBasis basis = [&] {
    try {
      return make_basis(c.basis);
    } catch (const std::invalid_argument& e) {
      fail(top.at("basis"), e.what());
    } catch (const IoError& e) {
      fail(top.at("basis"), e.what());
    }
  }();
  try {
    (void)make_kernel(c.kernel);
  } catch (const std::exception& e) {
    fail(top.at("kernel"), e.what());
  }
  const std::size_t N = basis.mode_count();
  const std::size_t Q = basis.node_count();
  auto check_length = [&](const YAML::Node& n, const std::vector<double>& v, const char* what) {
    if (v.size() > N) fail(n, fmt::format("'{}' has {} entries, the basis has {} modes", what, v.size(), N));
  };

  if (top.has("control")) {
    Block b(top.at("control"), "control", {"target_displacement", "target_velocity", "reg", "profiles"});
    if (b.has("target_displacement")) {
      c.control.target_displacement = number_list(b.at("target_displacement"), "control.target_displacement");
    }
    c.control.target_velocity = number_list(b.at("target_velocity"), "control.target_velocity");
    check_length(b.node(), c.control.target_displacement, "control.target_displacement");
    check_length(b.node(), c.control.target_velocity, "control.target_velocity");
    c.control.reg = b.get<double>("reg", c.control.reg);
    if (!(c.control.reg >= 0.0)) fail(b.at("reg"), "'control.reg' must be nonnegative");
    if (b.has("profiles")) {
      const auto list = b.at("profiles");
      if (!list.IsSequence() || list.size() == 0) fail(list, "'control.profiles' must be a nonempty list");
      for (const auto& p : list) {
        auto prof = number_list(p, "control.profiles entry");
        if (prof.size() != Q) {
          fail(p, fmt::format("profile has {} values, the boundary has {} nodes", prof.size(), Q));
        }
        c.control.profiles.push_back(std::move(prof));
      }
    }
  }
  if (top.has("simulate")) {
    Block b(top.at("simulate"), "simulate", {"initial_displacement", "initial_velocity", "scheme"});
    c.simulate.initial_displacement = number_list(b.at("initial_displacement"), "simulate.initial_displacement");
    c.simulate.initial_velocity = number_list(b.at("initial_velocity"), "simulate.initial_velocity");
    check_length(b.node(), c.simulate.initial_displacement, "simulate.initial_displacement");
    check_length(b.node(), c.simulate.initial_velocity, "simulate.initial_velocity");
    if (b.has("scheme")) c.simulate.scheme = parse_scheme(b.at("scheme"));
  }
  if (top.has("verify")) {
    Block b(top.at("verify"), "verify", {"samples", "modes"});
    c.verify.samples = b.get<std::size_t>("samples", c.verify.samples);
    if (c.verify.samples == 0) fail(b.at("samples"), "'verify.samples' must be at least 1");
    c.verify.modes = b.get<std::size_t>("modes", 0);
    if (c.verify.modes > N) fail(b.at("modes"), fmt::format("'verify.modes' exceeds the {} basis modes", N));
  }
  if (top.has("sweep")) {
    Block b(top.at("sweep"), "sweep", {"parameter", "values"});
    SweepSpec s;
    s.parameter = b.require<std::string>("parameter");
    expect_choice(b.at("parameter"), s.parameter, {"T", "modes", "kernel_scale"});
    if (!b.has("values")) fail(b.node(), "'sweep' requires 'values'");
    s.values = number_list(b.at("values"), "sweep.values");
    if (s.values.empty()) fail(b.at("values"), "'sweep.values' must not be empty");
    for (double v : s.values) {
      if (s.parameter == "T" && !(v > 0.0)) fail(b.at("values"), "sweep horizons must be positive");
      if (s.parameter == "modes" && (v < 1.0 || v != std::floor(v) || v > static_cast<double>(N))) {
        fail(b.at("values"), fmt::format("sweep mode counts must be integers in [1, {}]", N));
      }
    }
    c.sweep = std::move(s);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open config", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), base);
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["seed"] = c.seed;

  ordered_json b;
  b["type"] = c.basis.type;
  if (c.basis.type == "interval") {
    b["modes"] = c.basis.modes;
    b["length"] = c.basis.length;
    b["control_end"] = c.basis.control_end;
  } else if (c.basis.type == "rectangle") {
    b["nx"] = c.basis.nx;
    b["ny"] = c.basis.ny;
    b["lx"] = c.basis.lx;
    b["ly"] = c.basis.ly;
    b["edge"] = c.basis.edge;
    b["n_quad"] = c.basis.n_quad;
    if (c.basis.modes) b["modes"] = c.basis.modes;
  } else {
    b["path"] = c.basis.path.string();
    if (c.basis.modes) b["modes"] = c.basis.modes;
  }
  j["basis"] = b;

  ordered_json k;
  k["type"] = c.kernel.type;
  if (c.kernel.type == "prony") {
    ordered_json terms = ordered_json::array();
    for (const auto& t : c.kernel.terms) terms.push_back({t.weight, t.rate});
    k["terms"] = terms;
  } else if (c.kernel.type == "sampled") {
    k["path"] = c.kernel.path.string();
  }
  j["kernel"] = k;

  ordered_json t;
  t["T"] = c.time.T;
  t["steps"] = c.time.steps;
  t["h"] = c.time.step();
  t["T1"] = c.time.T1.value_or(c.time.T);
  j["time"] = t;

  ordered_json ctl;
  ctl["target_displacement"] = c.control.target_displacement;
  ctl["target_velocity"] = c.control.target_velocity;
  ctl["reg"] = c.control.reg;
  ctl["profiles"] = c.control.profiles;
  j["control"] = ctl;

  ordered_json sim;
  sim["initial_displacement"] = c.simulate.initial_displacement;
  sim["initial_velocity"] = c.simulate.initial_velocity;
  sim["scheme"] = c.simulate.scheme == Scheme::velocity_verlet ? "velocity_verlet" : "exponential_trapezoid";
  j["simulate"] = sim;

  ordered_json ver;
  ver["samples"] = c.verify.samples;
  ver["modes"] = c.verify.modes;
  j["verify"] = ver;

  if (c.sweep) {
    ordered_json sw;
    sw["parameter"] = c.sweep->parameter;
    sw["values"] = c.sweep->values;
    j["sweep"] = sw;
  }
  return j;
}

EigenBasis make_basis(const BasisSpec& s) {
  if (s.type == "interval") {
    const Endpoint end = s.control_end == "right" ? Endpoint::right
                         : s.control_end == "both" ? Endpoint::both
                                                   : Endpoint::left;
    return interval_basis(s.modes, s.length, end);
  }
  EigenBasis full = [&] {
    if (s.type == "rectangle") {
      const RectangleEdge e = s.edge == "top"    ? RectangleEdge::top
                              : s.edge == "left" ? RectangleEdge::left
                              : s.edge == "right" ? RectangleEdge::right
                                                  : RectangleEdge::bottom;
      return rectangle_basis(s.nx, s.ny, s.lx, s.ly, e, s.n_quad);
    }
    return load_basis_csv(s.path);
  }();
  return s.modes ? full.truncated(s.modes) : full;
}

MemoryKernel make_kernel(const KernelSpec& s) {
  if (s.type == "prony") return MemoryKernel::prony(s.terms);
  if (s.type == "sampled") {
    const auto rows = read_numeric_csv(s.path, false);
    if (rows.size() < 3) throw IoError(fmt::format("{}: at least 3 kernel samples required", s.path.string()));
    std::vector<double> values;
    for (const auto& r : rows) {
      if (r.values.size() != 2) {
        throw IoError(fmt::format("{}:{}: expected 't,M' columns", s.path.string(), r.line));
      }
      values.push_back(r.values[1]);
    }
    const double step = rows[1].values[0] - rows[0].values[0];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double expected = static_cast<double>(i) * step;
      if (std::abs(rows[i].values[0] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
        throw IoError(fmt::format("{}:{}: kernel samples must start at t = 0 on a uniform grid",
                                  s.path.string(), rows[i].line));
      }
    }
    return MemoryKernel::sampled(std::move(values), step);
  }
  return MemoryKernel::zero();
}

TimeGrid grid_for(const TimeSpec& spec, double horizon) {
  const double h = spec.step();
  const auto intervals = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
  return TimeGrid::uniform(horizon, std::max<std::size_t>(intervals, 1));
}

}  // namespace viscoctrl::cli
