#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "enspace/analysis.hpp"
#include "enspace/config.hpp"
#include "enspace/errors.hpp"
#include "enspace/plot.hpp"
#include "enspace/report.hpp"
#include "enspace/trajectory_io.hpp"
#include "enspace/version.hpp"

namespace fs = std::filesystem;

namespace enspace::cli {
namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create " + dir.string() + ": " + ec.message());
}

bool energy_based(ControllerKind k) {
  return k == ControllerKind::fblc || k == ControllerKind::smc;
}

/// Runs `n` jobs on the worker pool. Each job writes only its own slot, so
/// the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, const std::vector<std::size_t>& order, F&& job) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(worker_count()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) job(order[k]);
  };
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
}

struct MemberResult {
  bool configured = false;
  SimResult sim;
  Metrics metrics;
  std::optional<CertificateReport> cert;
  std::string error;
};

MemberResult run_member(const Scenario& scn) {
  MemberResult r;
  r.configured = true;
  r.sim = simulate(scn);
  r.metrics = compute_metrics(r.sim.traj, scn.y_ref, scn.window_fraction);
  r.cert = certificate_for(scn, r.sim.traj);
  if (r.cert) attach_certificate(r.metrics, *r.cert);
  return r;
}

std::string status_text(const MemberResult& r) {
  if (!r.configured) return "config_error";
  return std::string(to_string(r.sim.status));
}

double interp(const std::vector<TrajectoryRow>& rows, double t,
              double TrajectoryRow::*field) {
  if (rows.empty()) return std::nan("");
  if (t <= rows.front().t) return rows.front().*field;
  if (t >= rows.back().t) return rows.back().*field;
  auto it = std::lower_bound(rows.begin(), rows.end(), t,
                             [](const TrajectoryRow& r, double v) { return r.t < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return a.*field + w * (b.*field - a.*field);
}

std::string optional_num(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void report_config_error(std::ostream& log, const ConfigError& e) {
  fmt::print(log, "config error: {}\n", e.what());
}

}  // namespace

std::vector<std::string> ScenarioFlags::overrides() const {
  std::vector<std::string> o = sets;
  if (step) o.push_back("simulation.step=" + format_double(*step));
  if (horizon) o.push_back("simulation.horizon=" + format_double(*horizon));
  if (delay_steps) o.push_back("interconnect.delay_steps=" + std::to_string(*delay_steps));
  if (controller) o.push_back("controller.kind=" + *controller);
  if (seed) o.push_back("seed=" + std::to_string(*seed));
  return o;
}

int worker_count() {
  if (const char* env = std::getenv("ENSPACE_WORKERS")) {
    int n = 0;
    const std::string_view s(env);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && p == s.data() + s.size() && n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// --- run ---------------------------------------------------------------------

int cmd_run(const RunOptions& opt, std::ostream& log) {
  Scenario scn;
  RunManifest manifest;
  manifest.command = "run";
  manifest.tool_version = kVersion;
  try {
    if (!opt.manifest.empty()) {
      // Reproduce a previous run from its own artifacts.
      const fs::path mpath(opt.manifest);
      const RunManifest prev = manifest_from_document(read_file(mpath));
      const fs::path resolved = mpath.parent_path() / "scenario.resolved.yaml";
      const std::string text = read_file(resolved);
      if (sha256_hex(text) != prev.config_hash) {
        throw ConfigError("manifest.config_hash",
                          "does not match " + resolved.string());
      }
      scn = scenario_from_text(text, resolved.parent_path(), opt.flags.overrides());
      manifest.scenario_file = prev.scenario_file;
    } else {
      if (opt.flags.scenario.empty()) {
        throw ConfigError("--scenario", "a scenario file or --manifest is required");
      }
      scn = load_scenario(opt.flags.scenario, opt.flags.overrides());
      manifest.scenario_file = opt.flags.scenario;
    }
  } catch (const ConfigError& e) {
    report_config_error(log, e);
    return kExitConfig;
  }

  const fs::path out(opt.out);
  make_dir(out);
  const std::string resolved = scenario_to_text(scn);
  manifest.output_dir = out.string();
  manifest.seed = scn.seed;
  manifest.config_hash = sha256_hex(resolved);
  write_file(out / "scenario.resolved.yaml", resolved);

  const SimResult res = simulate(scn);
  Metrics metrics = compute_metrics(res.traj, scn.y_ref, scn.window_fraction);
  const auto cert = certificate_for(scn, res.traj);
  if (cert) attach_certificate(metrics, *cert);

  write_trajectory_csv(out / "trajectory.csv", res.traj);
  write_file(out / "metrics.txt", to_document(metrics));
  write_file(out / "residuals.txt", to_document(res.residuals));
  if (cert) write_file(out / "certificate.txt", to_document(*cert));
  if (!res.traj.rows.empty()) {
    write_file(out / "figure.svg",
               render_figure({{std::string(to_string(scn.controller.kind)), &res.traj}},
                             scn.name));
  }
  manifest.status = std::string(to_string(res.status));
  manifest.message = res.message;
  write_file(out / "manifest.yaml", to_document(manifest));

  fmt::print(log, "{}: {} in {:.2f} s, {} rows -> {}\n", scn.name,
             to_string(res.status), res.wall_seconds, res.traj.rows.size(),
             out.string());
  if (!res.ok()) {
    fmt::print(log, "simulation error: {}\n", res.message);
    return kExitSimulation;
  }
  fmt::print(log, "steady_state_error {} settling_time_2pct {} overshoot {}\n",
             format_double(metrics.steady_state_error),
             format_double(metrics.settling_time_2pct),
             format_double(metrics.overshoot));
  if (cert) {
    fmt::print(log, "certificate: {} ({} violations)\n",
               cert->passed() ? "passed" : "failed", cert->violations());
  }
  return kExitOk;
}

// --- compare -------------------------------------------------------------------

int cmd_compare(const CompareOptions& opt, std::ostream& log) {
  if (opt.controllers.empty()) {
    fmt::print(log, "config error: --controllers: empty list\n");
    return kExitConfig;
  }
  std::vector<Scenario> members;
  try {
    for (const auto& c : opt.controllers) {
      auto o = opt.flags.overrides();
      o.push_back("controller.kind=" + c);
      members.push_back(load_scenario(opt.flags.scenario, o));
    }
  } catch (const ConfigError& e) {
    report_config_error(log, e);
    return kExitConfig;
  }

  std::vector<MemberResult> results(members.size());
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), 0);
  parallel_for(members.size(), order, [&](std::size_t k) {
    try {
      results[k] = run_member(members[k]);
    } catch (const std::exception& e) {
      results[k].configured = true;
      results[k].error = e.what();
    }
  });

  const fs::path out(opt.out);
  make_dir(out);
  bool any_failed = false;
  std::string csv =
      "controller,status,settling_time_2pct,settling_time_2pct_span,overshoot,"
      "steady_state_error,control_effort_l2,control_total_variation,"
      "reaching_time,certificate_violations\n";
  std::string table = fmt::format("{:<14} {:>11} {:>13} {:>13} {:>11} {:>13} {:>13} {:>13}\n",
                                  "controller", "status", "settle_2pct", "settle_span",
                                  "overshoot", "sse", "effort_l2", "effort_tv");
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& r = results[k];
    const bool failed = !r.error.empty() || !r.sim.ok();
    any_failed = any_failed || failed;
    const std::string status = !r.error.empty() ? "failed" : (failed ? "failed:" + status_text(r) : "ok");
    const auto& m = r.metrics;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", opt.controllers[k], status,
                       format_double(m.settling_time_2pct),
                       format_double(m.settling_time_2pct_span),
                       format_double(m.overshoot), format_double(m.steady_state_error),
                       format_double(m.control_effort_l2),
                       format_double(m.control_total_variation),
                       optional_num(m.reaching_time), m.certificate_violations);
    table += fmt::format("{:<14} {:>11} {:>13.6g} {:>13.6g} {:>11.4g} {:>13.4g} {:>13.6g} {:>13.6g}\n",
                         opt.controllers[k], failed ? "FAILED" : "ok",
                         m.settling_time_2pct, m.settling_time_2pct_span, m.overshoot,
                         m.steady_state_error, m.control_effort_l2,
                         m.control_total_variation);
    if (!r.error.empty()) fmt::print(log, "{}: {}\n", opt.controllers[k], r.error);
    else if (failed) fmt::print(log, "{}: {}\n", opt.controllers[k], r.sim.message);
  }
  write_file(out / "comparison.csv", csv);
  write_file(out / "comparison.txt", table);
  log << table;

  // Plot data on the time grid of the first member that produced rows.
  const Trajectory* base = nullptr;
  for (const auto& r : results) {
    if (!r.sim.traj.rows.empty()) {
      base = &r.sim.traj;
      break;
    }
  }
  if (base != nullptr) {
    std::string series = "t";
    for (const auto& c : opt.controllers) {
      series += fmt::format(",x0_{0},x1_{0},y_{0},u_{0},P_load_{0}", c);
    }
    series += '\n';
    for (const auto& row : base->rows) {
      series += format_double(row.t);
      for (const auto& r : results) {
        for (auto f : {&TrajectoryRow::x0, &TrajectoryRow::x1, &TrajectoryRow::y,
                       &TrajectoryRow::u, &TrajectoryRow::P_load}) {
          series += ',';
          series += format_double(interp(r.sim.traj.rows, row.t, f));
        }
      }
      series += '\n';
    }
    write_file(out / "comparison_series.csv", series);

    std::vector<PlotSeries> plot;
    for (std::size_t k = 0; k < results.size(); ++k) {
      if (!results[k].sim.traj.rows.empty()) {
        plot.push_back({opt.controllers[k], &results[k].sim.traj});
      }
    }
    write_file(out / "figure.svg", render_figure(plot, members.front().name));
  }

  RunManifest manifest;
  manifest.command = "compare";
  manifest.scenario_file = opt.flags.scenario;
  manifest.output_dir = out.string();
  manifest.seed = members.front().seed;
  manifest.tool_version = kVersion;
  manifest.config_hash = sha256_hex(scenario_to_text(members.front()));
  manifest.status = any_failed ? "failed" : "ok";
  write_file(out / "manifest.yaml", to_document(manifest));
  return any_failed ? kExitSimulation : kExitOk;
}

// --- sweep ---------------------------------------------------------------------

namespace {

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

GridAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(spec, "grid must look like key=v1,v2 or key=start:step:stop");
  }
  GridAxis axis{spec.substr(0, eq), {}};
  const std::string rhs = spec.substr(eq + 1);
  if (std::count(rhs.begin(), rhs.end(), ':') == 2) {
    double a = 0, h = 0, b = 0;
    if (std::sscanf(rhs.c_str(), "%lf:%lf:%lf", &a, &h, &b) != 3 || !(h > 0) ||
        b < a) {
      throw ConfigError(axis.key, "bad range '" + rhs + "'");
    }
    const long n = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
    for (long k = 0; k < n; ++k) {
      axis.values.push_back(format_double(a + static_cast<double>(k) * h));
    }
  } else {
    std::stringstream ss(rhs);
    for (std::string v; std::getline(ss, v, ',');) {
      if (!v.empty()) axis.values.push_back(v);
    }
  }
  if (axis.values.empty()) throw ConfigError(axis.key, "no grid values");
  return axis;
}

bool value_less(const std::string& a, const std::string& b) {
  char* ea = nullptr;
  char* eb = nullptr;
  const double x = std::strtod(a.c_str(), &ea);
  const double y = std::strtod(b.c_str(), &eb);
  if (*ea == '\0' && *eb == '\0' && !a.empty() && !b.empty()) return x < y;
  return a < b;
}

}  // namespace

int cmd_sweep(const SweepOptions& opt, std::ostream& log) {
  std::vector<GridAxis> axes;
  Scenario base;
  try {
    for (const auto& g : opt.grid) axes.push_back(parse_axis(g));
    base = load_scenario(opt.flags.scenario, opt.flags.overrides());
  } catch (const ConfigError& e) {
    report_config_error(log, e);
    return kExitConfig;
  }
  const fs::path out(opt.out);
  make_dir(out);

  // Cartesian product, then sorted by the grid values (first axis major).
  std::vector<std::vector<std::string>> points;
  if (!axes.empty()) {
    points.push_back({});
    for (const auto& axis : axes) {
      std::vector<std::vector<std::string>> next;
      for (const auto& p : points) {
        for (const auto& v : axis.values) {
          auto q = p;
          q.push_back(v);
          next.push_back(std::move(q));
        }
      }
      points = std::move(next);
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) {
                       return std::lexicographical_compare(a.begin(), a.end(),
                                                           b.begin(), b.end(),
                                                           value_less);
                     });
  }

  std::vector<MemberResult> results(points.size());
  // Execution order is shuffled by the seed; output order is not.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(base.seed);
  std::shuffle(order.begin(), order.end(), rng);
  parallel_for(points.size(), order, [&](std::size_t k) {
    auto o = opt.flags.overrides();
    for (std::size_t a = 0; a < axes.size(); ++a) {
      o.push_back(axes[a].key + "=" + points[k][a]);
    }
    try {
      results[k] = run_member(load_scenario(opt.flags.scenario, o));
    } catch (const ConfigError& e) {
      results[k].configured = false;
      results[k].error = e.what();
    } catch (const std::exception& e) {
      results[k].configured = true;
      results[k].error = e.what();
    }
  });

  std::string csv;
  for (const auto& axis : axes) csv += axis.key + ",";
  csv +=
      "status,steady_state_error,overshoot,settling_time_2pct,"
      "settling_time_2pct_span,control_effort_l2,control_total_variation,"
      "reaching_time,certificate_violations,condition_violations,message\n";
  long first_cond = -1, first_cert = -1, failures = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& r = results[k];
    for (const auto& v : points[k]) csv += v + ",";
    const std::string status = r.error.empty() ? status_text(r) : "error";
    const bool failed = !r.error.empty() || !r.sim.ok();
    failures += failed ? 1 : 0;
    const long cond = r.cert ? r.cert->condition_violations : 0;
    const long viol = r.cert ? r.cert->violations() : 0;
    if (first_cond < 0 && cond > 0) first_cond = static_cast<long>(k);
    if (first_cert < 0 && (viol > 0 || (failed && r.configured))) {
      first_cert = static_cast<long>(k);
    }
    std::string msg = r.error.empty() ? r.sim.message : r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    const auto& m = r.metrics;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", status,
                       format_double(m.steady_state_error), format_double(m.overshoot),
                       format_double(m.settling_time_2pct),
                       format_double(m.settling_time_2pct_span),
                       format_double(m.control_effort_l2),
                       format_double(m.control_total_variation),
                       optional_num(m.reaching_time), viol, cond, msg);
  }
  write_file(out / "sweep.csv", csv);

  // Best point per metric among the clean runs.
  std::string summary = fmt::format("sweep:\n  points: {}\n  failures: {}\n",
                                    points.size(), failures);
  auto label = [&](long k) {
    std::string s;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (a > 0) s += " ";
      s += axes[a].key + "=" + points[static_cast<std::size_t>(k)][a];
    }
    return s;
  };
  const std::pair<const char*, double Metrics::*> best_of[] = {
      {"steady_state_error", &Metrics::steady_state_error},
      {"overshoot", &Metrics::overshoot},
      {"settling_time_2pct_span", &Metrics::settling_time_2pct_span},
      {"control_effort_l2", &Metrics::control_effort_l2},
      {"control_total_variation", &Metrics::control_total_variation}};
  for (const auto& [name, field] : best_of) {
    long best = -1;
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto& r = results[k];
      if (!r.error.empty() || !r.sim.ok()) continue;
      if (best < 0 || r.metrics.*field < results[static_cast<std::size_t>(best)].metrics.*field) {
        best = static_cast<long>(k);
      }
    }
    if (best >= 0) {
      summary += fmt::format("  best_{}: \"{}\"\n  best_{}_value: {}\n", name,
                             label(best), name,
                             format_double(results[static_cast<std::size_t>(best)].metrics.*field));
    }
  }
  if (axes.size() == 1 && energy_based(base.controller.kind)) {
    summary += fmt::format("  first_condition_violation: \"{}\"\n",
                           first_cond < 0 ? "none" : points[first_cond][0]);
    summary += fmt::format("  first_certificate_violation: \"{}\"\n",
                           first_cert < 0 ? "none" : points[first_cert][0]);
  }
  write_file(out / "sweep_summary.txt", summary);
  log << summary;

  RunManifest manifest;
  manifest.command = "sweep";
  manifest.scenario_file = opt.flags.scenario;
  manifest.output_dir = out.string();
  manifest.seed = base.seed;
  manifest.tool_version = kVersion;
  manifest.config_hash = sha256_hex(scenario_to_text(base));
  manifest.status = failures > 0 ? "partial" : "ok";
  write_file(out / "manifest.yaml", to_document(manifest));
  return kExitOk;
}

// --- verify --------------------------------------------------------------------

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& log) {
  Scenario scn;
  Trajectory traj;
  try {
    if (opt.scenario.empty()) {
      throw ConfigError("--scenario", "the run's scenario file is required");
    }
    scn = load_scenario(opt.scenario, opt.sets);
    if (!energy_based(scn.controller.kind)) {
      throw ConfigError("controller.kind",
                        "certificates exist for fblc and smc only");
    }
    if (opt.mbar) scn.smc_mbar = *opt.mbar;
  } catch (const ConfigError& e) {
    report_config_error(log, e);
    return kExitConfig;
  }
  try {
    traj = read_trajectory_csv(fs::path(opt.trajectory), scn.step, scn.record_every);
  } catch (const InvalidInput& e) {
    fmt::print(log, "schema error: {}\n", e.what());
    return kExitConfig;
  }
  if (traj.plant != scn.plant) {
    fmt::print(log, "schema error: trajectory plant does not match the scenario\n");
    return kExitConfig;
  }
  traj.controller = scn.controller.kind;
  const auto cert = certificate_for(scn, traj);
  const std::string doc = to_document(*cert);
  out << doc;
  if (!opt.out.empty()) {
    make_dir(opt.out);
    write_file(fs::path(opt.out) / "certificate.txt", doc);
  }
  return kExitOk;
}

// --- argument parsing ----------------------------------------------------------

namespace {

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario file (YAML)");
  cmd->add_option("--set", f.sets, "Override, dotted.key=value (repeatable)");
  cmd->add_option("--step", f.step, "Integrator step h [s]");
  cmd->add_option("--horizon", f.horizon, "Simulated time T [s]");
  cmd->add_option("--delay-steps", f.delay_steps, "Report delay in steps");
  cmd->add_option("--controller", f.controller,
                  "fblc | smc | proportional | brayton_moser | droop");
  cmd->add_option("--seed", f.seed, "Seed for randomized sweep ordering");
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Energy-space control simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunOptions run;
  auto* c_run = app.add_subcommand("run", "Simulate one scenario");
  add_scenario_flags(c_run, run.flags);
  c_run->add_option("--out", run.out, "Output directory");
  c_run->add_option("--manifest", run.manifest, "Re-run from a run manifest");

  CompareOptions cmp;
  auto* c_cmp = app.add_subcommand("compare", "Run one scenario under several controllers");
  add_scenario_flags(c_cmp, cmp.flags);
  c_cmp->add_option("--controllers", cmp.controllers, "Controller list")
      ->delimiter(',')
      ->required();
  c_cmp->add_option("--out", cmp.out, "Output directory");

  SweepOptions swp;
  auto* c_swp = app.add_subcommand("sweep", "Evaluate a parameter grid");
  add_scenario_flags(c_swp, swp.flags);
  c_swp->add_option("--grid", swp.grid, "key=v1,v2,... or key=start:step:stop (repeatable)");
  c_swp->add_option("--out", swp.out, "Output directory");

  VerifyOptions ver;
  auto* c_ver = app.add_subcommand("verify", "Certificate report for a recorded trajectory");
  c_ver->add_option("--trajectory", ver.trajectory, "trajectory.csv from a run")->required();
  c_ver->add_option("--scenario", ver.scenario, "The run's scenario.resolved.yaml");
  c_ver->add_option("--set", ver.sets, "Override, dotted.key=value (repeatable)");
  c_ver->add_option("--mbar", ver.mbar, "Assumed disturbance bound for SMC");
  c_ver->add_option("--out", ver.out, "Directory for certificate.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (c_run->parsed()) {
      if (run.flags.scenario.empty() && run.manifest.empty()) {
        fmt::print(std::cerr, "config error: --scenario: required\n");
        return kExitConfig;
      }
      return cmd_run(run, std::cerr);
    }
    if (swp.flags.scenario.empty() && c_swp->parsed()) {
      fmt::print(std::cerr, "config error: --scenario: required\n");
      return kExitConfig;
    }
    if (cmp.flags.scenario.empty() && c_cmp->parsed()) {
      fmt::print(std::cerr, "config error: --scenario: required\n");
      return kExitConfig;
    }
    if (c_cmp->parsed()) return cmd_compare(cmp, std::cerr);
    if (c_swp->parsed()) return cmd_sweep(swp, std::cerr);
    return cmd_verify(ver, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitSimulation;
  }
}

}  // namespace enspace::cli
