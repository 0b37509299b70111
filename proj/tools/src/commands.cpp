#include "viscoctrl_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "viscoctrl/csv_io.hpp"
#include "viscoctrl/errors.hpp"
#include "viscoctrl/moment_control.hpp"
#include "viscoctrl/verification.hpp"

namespace viscoctrl::cli {

namespace {

using nlohmann::ordered_json;

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<double> padded(const std::vector<double>& v, std::size_t n) {
  std::vector<double> out(n, 0.0);
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

Eigen::MatrixXd control_profiles(const ControlSpec& spec, const EigenBasis& basis) {
  if (spec.profiles.empty()) {
    return Eigen::MatrixXd::Ones(1, static_cast<Eigen::Index>(basis.node_count()));
  }
  Eigen::MatrixXd p(static_cast<Eigen::Index>(spec.profiles.size()), static_cast<Eigen::Index>(basis.node_count()));
  for (std::size_t r = 0; r < spec.profiles.size(); ++r) {
    for (std::size_t q = 0; q < basis.node_count(); ++q) {
      p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(q)) = spec.profiles[r].at(q);
    }
  }
  return p;
}

MomentMatrix build_map(const EigenBasis& basis, const MemoryKernel& kernel, double horizon, const TimeGrid& grid,
                       const Eigen::MatrixXd& profiles) {
  if (kernel.vanishes()) return build_elastic_moment_matrix(basis, horizon, grid, profiles);
  return build_viscoelastic_moment_matrix(basis, kernel, horizon, grid, profiles);
}

struct ControlRun {
  MomentMatrix mm;
  ControlSolution solution;
  InverseReport inverse;
};

ControlRun solve_control(const RunConfig& c, const EigenBasis& basis, const MemoryKernel& kernel, double horizon) {
  const TimeGrid grid = grid_for(c.time, horizon);
  const auto profiles = control_profiles(c.control, basis);
  MomentMatrix mm = build_map(basis, kernel, grid.horizon(), grid, profiles);
  const std::size_t N = basis.mode_count();
  const auto xi = CoeffState::from_real(padded(c.control.target_displacement, N), Scale::L2);
  const auto eta = CoeffState::from_real(padded(c.control.target_velocity, N), Scale::Hm1);
  auto solution = min_norm_control(xi, eta, mm, c.control.reg);
  auto inverse = inverse_inequality_constant(mm);
  return {std::move(mm), std::move(solution), inverse};
}

}  // namespace

Outputs cmd_resolvent(const RunConfig& c) {
  const auto kernel = make_kernel(c.kernel);
  const double horizon = std::max(c.time.T, c.time.T1.value_or(c.time.T));
  const auto res = resolvent_kernel(kernel, c.time.step(), horizon);
  const auto constants = maccamy_constants(res);

  CsvTable table;
  std::vector<double> t(res.grid.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = res.grid.at(k);
  table.add_column("t", std::move(t));
  table.add_column("R", res.R);
  table.add_column("K", constants.K);

  ordered_json j;
  j["kernel_descriptor"] = kernel.descriptor();
  j["a"] = constants.a;
  j["b"] = constants.b;
  j["residual"] = res.residual;
  j["residual_tolerance"] = res.residual_tolerance;
  if (res.analytic) {
    j["analytic"] = {{"weight", res.analytic->weight}, {"rate", res.analytic->rate}};
    double dev = 0.0;
    for (std::size_t k = 0; k < res.R.size(); ++k) dev = std::max(dev, std::abs(res.R[k] - res.marched_R[k]));
    j["marched_max_deviation"] = dev;
  } else {
    j["analytic"] = nullptr;
  }
  j["h"] = res.grid.step;
  j["horizon"] = res.grid.horizon();
  j["config"] = to_json(c);
  return {{"resolvent.csv", table.to_string()}, {"resolvent.json", dump(j)}};
}

Outputs cmd_simulate(const RunConfig& c) {
  const auto basis = make_basis(c.basis);
  const auto kernel = make_kernel(c.kernel);
  const TimeGrid grid = grid_for(c.time, c.time.T);
  const std::size_t N = basis.mode_count();
  const auto w0 = padded(c.simulate.initial_displacement, N);
  const auto w1 = padded(c.simulate.initial_velocity, N);

  std::vector<ModalTrajectory> modes(N);
  for (std::size_t m = 0; m < N; ++m) {
    modes[m] = solve_modal_memory(basis.lambda(m), kernel, w0[m], w1[m], {}, grid, c.simulate.scheme, m);
  }
  const std::size_t last = grid.intervals;
  ordered_json j;
  j["kernel_descriptor"] = kernel.descriptor();
  j["T"] = grid.horizon();
  j["h"] = grid.step;
  j["N"] = N;
  std::vector<double> zT(N), zpT(N), energy0(N), energyT(N);
  for (std::size_t m = 0; m < N; ++m) {
    const double l = basis.lambda(m);
    zT[m] = modes[m].z[last];
    zpT[m] = modes[m].zp[last];
    energy0[m] = l * l * w0[m] * w0[m] + w1[m] * w1[m];
    energyT[m] = l * l * zT[m] * zT[m] + zpT[m] * zpT[m];
  }
  j["terminal_displacement"] = zT;
  j["terminal_velocity"] = zpT;
  j["initial_energy"] = energy0;
  j["terminal_energy"] = energyT;
  j["config"] = to_json(c);
  return {{"trajectory.csv", trajectories_to_csv(modes)}, {"simulate.json", dump(j)}};
}

Outputs cmd_control(const RunConfig& c) {
  const auto basis = make_basis(c.basis);
  const auto kernel = make_kernel(c.kernel);
  const double horizon = c.time.T1.value_or(c.time.T);
  const auto run = solve_control(c, basis, kernel, horizon);
  const std::size_t N = basis.mode_count();
  const auto xi = CoeffState::from_real(padded(c.control.target_displacement, N), Scale::L2);
  const auto eta = CoeffState::from_real(padded(c.control.target_velocity, N), Scale::Hm1);
  const auto steer = steer_and_verify(run.solution.control, kernel, basis, xi, eta);

  const auto& control = run.solution.control;
  CsvTable table;
  std::vector<double> t(control.grid().size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = control.grid().at(k);
  table.add_column("t", std::move(t));
  for (std::size_t p = 0; p < control.profile_count(); ++p) {
    const Eigen::VectorXd col = control.amplitudes().col(static_cast<Eigen::Index>(p));
    table.add_column(fmt::format("amplitude_{}", p + 1), std::vector<double>(col.data(), col.data() + col.size()));
  }

  ordered_json j;
  j["terminal_error"] = steer.terminal_error;
  j["control_norm"] = steer.control_norm;
  j["gramian_sigma_min"] = run.inverse.gramian_min;
  j["gramian_sigma_max"] = run.inverse.gramian_max;
  j["T"] = control.grid().horizon();
  j["N"] = N;
  j["kernel_descriptor"] = kernel.descriptor();
  j["predicted_residual"] = run.solution.residual;
  j["rank"] = run.solution.rank;
  j["h"] = control.grid().step;
  j["config"] = to_json(c);
  return {{"control.csv", table.to_string()}, {"control.json", dump(j)}};
}

Outputs cmd_verify(const RunConfig& c) {
  const auto full = make_basis(c.basis);
  const auto basis = c.verify.modes ? full.truncated(c.verify.modes) : full;
  const auto kernel = make_kernel(c.kernel);
  const TimeGrid grid = grid_for(c.time, c.time.T);

  const auto direct = direct_inequality_ratio(basis, kernel, grid.horizon(), grid.step, c.verify.samples, c.seed);
  const auto profiles = control_profiles(c.control, basis);
  const auto inverse = inverse_inequality_constant(build_map(basis, kernel, grid.horizon(), grid, profiles));
  const double sigma = orthogonality_test(basis, kernel, grid.horizon(), grid.step, basis.mode_count());

  CsvTable table;
  std::vector<double> idx(direct.running_sup.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<double>(k + 1);
  table.add_column("samples", std::move(idx));
  table.add_column("constant", direct.running_sup);

  ordered_json j;
  j["T"] = grid.horizon();
  j["h"] = grid.step;
  j["N"] = basis.mode_count();
  j["kernel_descriptor"] = kernel.descriptor();
  j["direct"] = {{"constant_estimate", direct.constant_estimate},
                 {"exact_constant", direct.exact_constant},
                 {"sample_count", direct.sample_count},
                 {"worst_case_input", direct.worst_case_input},
                 {"seed", direct.seed}};
  j["inverse"] = {{"m_hat", inverse.m_hat},
                  {"gramian_sigma_min", inverse.gramian_min},
                  {"gramian_sigma_max", inverse.gramian_max},
                  {"N", inverse.modes}};
  j["orthogonality"] = {{"sigma_min", sigma}, {"N", basis.mode_count()}};
  j["config"] = to_json(c);
  return {{"verify_samples.csv", table.to_string()}, {"verify.json", dump(j)}};
}

Outputs cmd_sweep(const RunConfig& c) {
  if (!c.sweep || c.sweep->values.empty()) throw ConfigError("sweep: missing or empty 'sweep.values'");
  const auto& sw = *c.sweep;
  const auto full = make_basis(c.basis);
  const auto base_kernel = make_kernel(c.kernel);

  std::vector<double> m_hat, residual, norm, sigma;
  for (double v : sw.values) {
    double horizon = c.time.T1.value_or(c.time.T);
    EigenBasis basis = full;
    MemoryKernel kernel = base_kernel;
    if (sw.parameter == "T") horizon = v;
    if (sw.parameter == "modes") basis = full.truncated(static_cast<std::size_t>(v));
    if (sw.parameter == "kernel_scale") kernel = base_kernel.scaled(v);
    RunConfig local = c;
    if (local.control.target_displacement.size() > basis.mode_count()) local.control.target_displacement.resize(basis.mode_count());
    if (local.control.target_velocity.size() > basis.mode_count()) local.control.target_velocity.resize(basis.mode_count());
    const auto run = solve_control(local, basis, kernel, horizon);
    m_hat.push_back(run.inverse.m_hat);
    residual.push_back(run.solution.residual);
    norm.push_back(run.solution.control_norm);
    const TimeGrid grid = grid_for(c.time, horizon);
    sigma.push_back(orthogonality_test(basis, kernel, grid.horizon(), grid.step, basis.mode_count()));
  }

  CsvTable table;
  table.add_column(sw.parameter, sw.values);
  table.add_column("m_hat", m_hat);
  table.add_column("residual", residual);
  table.add_column("control_norm", norm);
  table.add_column("sigma_min", sigma);

  ordered_json j;
  j["parameter"] = sw.parameter;
  j["values"] = sw.values;
  j["m_hat"] = m_hat;
  j["residual"] = residual;
  j["control_norm"] = norm;
  j["sigma_min"] = sigma;
  j["kernel_descriptor"] = base_kernel.descriptor();
  j["config"] = to_json(c);
  return {{"sweep.csv", table.to_string()}, {"sweep.json", dump(j)}};
}

Outputs run_verb(const std::string& verb, const RunConfig& config) {
  if (verb == "resolvent") return cmd_resolvent(config);
  if (verb == "simulate") return cmd_simulate(config);
  if (verb == "control") return cmd_control(config);
  if (verb == "verify") return cmd_verify(config);
  if (verb == "sweep") return cmd_sweep(config);
  throw ConfigError(fmt::format("unknown command '{}'", verb));
}

void commit_outputs(const std::filesystem::path& out_dir, const Outputs& outputs) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("{}: cannot create output directory: {}", out_dir.string(), ec.message()));

  std::vector<std::filesystem::path> temps;
  auto discard = [&] {
    for (const auto& t : temps) std::filesystem::remove(t, ec);
  };
  for (const auto& [name, content] : outputs) {
    auto tmp = out_dir / (name + ".partial");
    temps.push_back(tmp);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      discard();
      throw IoError(fmt::format("{}: write failed", tmp.string()));
    }
  }
  // Targets created by this call are removed again if a later rename fails.
  std::vector<std::filesystem::path> created;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto target = out_dir / outputs[i].first;
    const bool existed = std::filesystem::exists(target, ec);
    std::filesystem::rename(temps[i], target, ec);
    if (ec) {
      const auto message = ec.message();
      discard();
      for (const auto& c : created) std::filesystem::remove(c, ec);
      throw IoError(fmt::format("{}: rename failed: {}", target.string(), message));
    }
    if (!existed) created.push_back(target);
  }
}

int exit_code_for_current_exception() noexcept {
  try {
    throw;
  } catch (const ConfigError&) {
    return 2;
  } catch (const NumericalGuardError&) {
    return 3;
  } catch (const IoError&) {
    return 4;
  } catch (const std::invalid_argument&) {
    return 2;
  } catch (...) {
    return 1;
  }
}

}  // namespace viscoctrl::cli
