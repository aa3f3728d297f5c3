// Acceptance run: one PASS/FAIL line per criterion, with the measured value,
// the tolerance and the integration step used.
//
// Exit status is non-zero when a criterion fails, unless it is listed in
// kKnownRed with the reason it cannot be met.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "enspace/analysis.hpp"
#include "enspace/config.hpp"
#include "enspace/sim_engine.hpp"

using namespace enspace;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios{ENSPACE_SCENARIO_DIR};

// Criteria that are allowed to fail, with the reason. Empty when all are met.
const std::map<std::string, std::string> kKnownRed{};

struct Outcome {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> g_outcomes;

void report(const std::string& id, bool pass, const std::string& detail) {
  g_outcomes.push_back({id, pass, detail});
  std::printf("%-4s %s  %s\n", id.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

Scenario scenario(const std::string& file,
                  const std::vector<std::string>& overrides = {}) {
  return load_scenario(kScenarios / file, overrides);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Independent oracles -------------------------------------------------------

// RLC set point: i = P/y, u = y + R P / y.
struct RlcPoint {
  double i, v, u;
};
RlcPoint rlc_oracle(const Scenario& s, double P) {
  return {P / s.y_ref, s.y_ref, s.y_ref + s.rlc.R1 * P / s.y_ref};
}

// Droop speed: bracketed root of Kt a(w) - P - D w^2 with a = -(w - y)/r.
double droop_oracle(const Scenario& s, double P) {
  const auto& g = s.gen;
  const auto& d = s.controller.droop;
  auto f = [&](double w) {
    return -g.Kt * (w - s.y_ref) / d.r - P - g.D1 * w * w;
  };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, 0.5 * s.y_ref, s.y_ref, boost::math::tools::eps_tolerance<double>(52),
      iters);
  return 0.5 * (lo + hi);
}

// Energy-error trajectory of e'' + K2 e' + K1 e = 0 with e(0), e'(0) given;
// returns (e, e') at t. Distinct real roots for the shipped gains.
std::pair<double, double> linear_error(double K1, double K2, double e0,
                                       double de0, double t) {
  const double disc = K2 * K2 - 4.0 * K1;
  if (disc > 0) {
    const double r1 = 0.5 * (-K2 + std::sqrt(disc));
    const double r2 = 0.5 * (-K2 - std::sqrt(disc));
    const double c1 = (de0 - r2 * e0) / (r1 - r2);
    const double c2 = e0 - c1;
    return {c1 * std::exp(r1 * t) + c2 * std::exp(r2 * t),
            c1 * r1 * std::exp(r1 * t) + c2 * r2 * std::exp(r2 * t)};
  }
  const double a = -0.5 * K2;
  if (disc == 0) {
    const double c2 = de0 - a * e0;
    return {(e0 + c2 * t) * std::exp(a * t),
            (a * (e0 + c2 * t) + c2) * std::exp(a * t)};
  }
  const double w = 0.5 * std::sqrt(-disc);
  const double B = (de0 - a * e0) / w;
  const double ex = std::exp(a * t);
  const double e = ex * (e0 * std::cos(w * t) + B * std::sin(w * t));
  const double de = a * e + ex * w * (-e0 * std::sin(w * t) + B * std::cos(w * t));
  return {e, de};
}

SimResult run(const Scenario& s) { return simulate(s); }

std::string runtime_note(const SimResult& r) {
  return fmt::format("{:.2f}s", r.wall_seconds);
}

// --- criteria ----------------------------------------------------------------

void criterion_1() {
  constexpr double tol = 1e-3;
  constexpr double max_wall = 10.0;
  struct Member {
    std::string ctl;
    std::vector<std::string> overrides;
  };
  // The Brayton-Moser loop has a fast mode near -1.3e5 1/s and is run at
  // h = 1e-5; the other laws use h = 1e-4.
  const std::vector<Member> members{
      {"fblc", {}},
      {"smc", {}},
      {"proportional", {}},
      {"brayton_moser", {"simulation.step=1e-5", "simulation.record_every=10"}},
  };
  std::vector<std::future<SimResult>> jobs;
  std::vector<Scenario> scns;
  for (const auto& m : members) {
    auto o = m.overrides;
    o.push_back("controller.kind=" + m.ctl);
    scns.push_back(scenario("rlc_const_fblc.yaml", o));
  }
  for (const auto& s : scns) jobs.push_back(std::async(std::launch::async, run, s));
  for (std::size_t k = 0; k < members.size(); ++k) {
    const SimResult r = jobs[k].get();
    const Scenario& s = scns[k];
    const RlcPoint eq = rlc_oracle(s, 1000.0);
    bool ok = r.ok();
    std::string d;
    if (ok) {
      const auto& b = r.traj.rows.back();
      const double ev = rel(b.x1, eq.v), ei = rel(b.x0, eq.i), eu = rel(b.u, eq.u);
      ok = ev <= tol && ei <= tol && eu <= tol && r.wall_seconds < max_wall;
      d = fmt::format(
          "v={:.6f} i={:.6f} u={:.6f} rel.err=({:.1e},{:.1e},{:.1e}) tol={:.0e} "
          "h={:g} T={:g} wall={} (<{:g}s)",
          b.x1, b.x0, b.u, ev, ei, eu, tol, s.step, s.horizon,
          runtime_note(r), max_wall);
    } else {
      d = r.message;
    }
    report("C1", ok, "RLC " + members[k].ctl + ": " + d);
  }
}

void criterion_2() {
  constexpr double tol_w = 1e-4, tol_pm = 1e-3, tol_droop = 1e-6;
  constexpr double max_wall = 10.0;
  const Scenario fb = scenario("gen_sigmoid_fblc.yaml");
  const Scenario sm = scenario("gen_sigmoid_smc.yaml");
  const Scenario dr = scenario("gen_sigmoid_droop.yaml");
  auto jf = std::async(std::launch::async, run, fb);
  auto js = std::async(std::launch::async, run, sm);
  auto jd = std::async(std::launch::async, run, dr);
  for (auto [name, scn, fut] :
       {std::tuple{"fblc", &fb, &jf}, std::tuple{"smc", &sm, &js}}) {
    const SimResult r = fut->get();
    if (!r.ok()) {
      report("C2", false, std::string("generator ") + name + ": " + r.message);
      continue;
    }
    const auto& b = r.traj.rows.back();
    const double P = total_load(scn->loads, b.t).P;
    const double pm_ref = P + scn->gen.D1 * b.x0 * b.x0;
    const double ew = rel(b.x0, scn->y_ref), ep = rel(b.x1, pm_ref);
    const bool ok = ew <= tol_w && ep <= tol_pm && r.wall_seconds < max_wall;
    report("C2", ok,
           fmt::format("generator {}: omega={:.6f} Pm={:.3f} (oracle {:.3f}) "
                       "rel.err=({:.1e},{:.1e}) tol=({:.0e},{:.0e}) h={:g} T={:g} "
                       "wall={} (<{:g}s)",
                       name, b.x0, b.x1, pm_ref, ew, ep, tol_w, tol_pm,
                       scn->step, scn->horizon, runtime_note(r), max_wall));
  }
  const SimResult r = jd.get();
  if (!r.ok()) {
    report("C2", false, "generator droop: " + r.message);
    return;
  }
  const auto& b = r.traj.rows.back();
  const double w_oracle = droop_oracle(dr, total_load(dr.loads, b.t).P);
  const double e = rel(b.x0, w_oracle);
  report("C2", e <= tol_droop && r.wall_seconds < max_wall,
         fmt::format("generator droop: omega={:.10f} root-finder={:.10f} "
                     "offset={:.4f} rad/s rel.err={:.1e} tol={:.0e} h={:g} T={:g} "
                     "wall={}",
                     b.x0, w_oracle, b.x0 - dr.y_ref, e, tol_droop, dr.step,
                     dr.horizon, runtime_note(r)));
}

void criterion_3() {
  constexpr double ratio_tol = 1e-6;
  // On the RLC plant the slow error mode is -1.127 1/s, so V falls by 1e-6
  // only after about 6.1 s; the run is extended to 8 s.
  const std::vector<std::pair<std::string, Scenario>> cases{
      {"RLC", scenario("rlc_const_fblc.yaml", {"simulation.horizon=8"})},
      {"generator", scenario("gen_sigmoid_fblc.yaml")},
  };
  for (const auto& [name, s] : cases) {
    const SimResult r = simulate(s);
    if (!r.ok()) {
      report("C3", false, name + ": " + r.message);
      continue;
    }
    const CertificateReport c = fblc_certificate(r.traj, s.controller.fblc);
    const double ratio = c.V_final / c.V0;
    report("C3", c.monotone_violations == 0 && ratio <= ratio_tol,
           fmt::format("FBLC {}: monotonicity violations={} (threshold 1e-12*maxV) "
                       "V(T)/V(0)={:.2e} tol={:.0e} h={:g} T={:g}",
                       name, c.monotone_violations, ratio, ratio_tol, s.step,
                       s.horizon));
  }
}

void criterion_4() {
  constexpr double decay_tol = 0.05;
  const std::vector<std::pair<std::string, Scenario>> cases{
      {"RLC", scenario("rlc_const_smc.yaml", {"controller.smc.eps_bl=0"})},
      {"generator", scenario("gen_sigmoid_smc.yaml", {"controller.smc.eps_bl=0"})},
  };
  for (const auto& [name, s] : cases) {
    const SimResult r = simulate(s);
    if (!r.ok()) {
      report("C4", false, name + ": " + r.message);
      continue;
    }
    const CertificateReport c = smc_certificate(r.traj, s.controller.smc, 0.0);
    const bool reach_ok =
        c.reached && c.reaching_time <= c.reaching_bound + c.reaching_tolerance;
    const bool ok = reach_ok && c.vdot_bound_violations == 0 &&
                    c.v_increase_violations == 0 && c.decay_fitted &&
                    c.decay_rate_error <= decay_tol;
    report("C4", ok,
           fmt::format("SMC {} (eps_bl=0): t_r={:.6g} s bound |sigma0|/M0={:.6g} s "
                       "(+{:.2g} s step/drift allowance) Vdot-bound violations={} "
                       "decay rate={:.4f} vs M1={:g} err={:.2f}% tol={:g}% "
                       "({} pts) h={:g} T={:g}",
                       name, c.reaching_time, c.reaching_bound,
                       c.reaching_tolerance,
                       c.vdot_bound_violations + c.v_increase_violations,
                       c.decay_rate, s.controller.smc.M1, 100 * c.decay_rate_error,
                       100 * decay_tol, c.decay_points, s.step, s.horizon));
  }
}

void criterion_5() {
  constexpr double tol = 0.01;
  const Scenario s = scenario("rlc_const_fblc.yaml");
  const SimResult r = simulate(s);
  if (!r.ok()) {
    report("C5", false, r.message);
    return;
  }
  const auto& rows = r.traj.rows;
  const double K1 = s.controller.fblc.K1, K2 = s.controller.fblc.K2;
  const double e0 = rows.front().E - rows.front().E_ref;
  const double de0 = rows.front().p - rows.front().p_ref;
  double max_E = 0, max_p = 0, err_E = 0, err_p = 0;
  for (const auto& row : rows) {
    const auto [eE, ep] = linear_error(K1, K2, e0, de0, row.t - rows.front().t);
    max_E = std::max(max_E, std::abs(eE));
    max_p = std::max(max_p, std::abs(ep));
    err_E = std::max(err_E, std::abs(row.E - row.E_ref - eE));
    err_p = std::max(err_p, std::abs(row.p - row.p_ref - ep));
  }
  const double rE = err_E / max_E, rp = err_p / max_p;
  const double disc = std::sqrt(K2 * K2 - 4 * K1);
  report("C5", rE <= tol && rp <= tol,
         fmt::format("FBLC RLC vs analytic e''+{:g}e'+{:g}e=0 (roots {:.3f}, {:.3f}): "
                     "max rel.err e_E={:.2e} e_p={:.2e} tol={:.0e} h={:g} T={:g}",
                     K2, K1, 0.5 * (-K2 + disc), 0.5 * (-K2 - disc), rE, rp, tol,
                     s.step, s.horizon));
}

void criterion_6() {
  constexpr double order_tol = 3.5, tel_tol = 1e-9;
  // The order is read on the opening transient, where the fast mode of the
  // loop (about -5500 1/s) makes truncation error dominant. Once it has
  // decayed the residuals sit at the round-off floor of the energy
  // differences (|dE|/h ~ 1e-16 * E / h), which grows as h shrinks; that
  // floor is reported alongside.
  constexpr double t_lo = 0.0, t_hi = 0.01, floor_lo = 0.05;
  const std::vector<double> steps{1e-4, 5e-5, 2.5e-5};
  std::vector<std::future<SimResult>> jobs;
  for (double h : steps) {
    jobs.push_back(std::async(std::launch::async, run,
                              scenario("rlc_const_fblc.yaml",
                                       {fmt::format("simulation.step={}", h),
                                        "simulation.horizon=1"})));
  }
  struct Peaks {
    double E = 0, p = 0, Et = 0;
  };
  std::vector<Peaks> peaks;
  double tel = 0, floor = 0;
  bool ok = true;
  for (auto& j : jobs) {
    const SimResult r = j.get();
    ok = ok && r.ok();
    Peaks pk;
    for (const auto& row : r.traj.rows) {
      if (row.t >= floor_lo && peaks.empty()) {
        floor = std::max({floor, std::abs(row.res_E), std::abs(row.res_p),
                          std::abs(row.res_Et)});
      }
      if (row.t <= t_lo || row.t > t_hi) continue;
      pk.E = std::max(pk.E, std::abs(row.res_E));
      pk.p = std::max(pk.p, std::abs(row.res_p));
      pk.Et = std::max(pk.Et, std::abs(row.res_Et));
    }
    peaks.push_back(pk);
    tel = std::max(tel, r.residuals.tellegen_P_relative);
  }
  if (!ok) {
    report("C6", false, "a refinement run failed");
    return;
  }
  double worst = 1e9;
  std::string orders;
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    const double oE = std::log2(peaks[k - 1].E / peaks[k].E);
    const double op = std::log2(peaks[k - 1].p / peaks[k].p);
    const double ot = std::log2(peaks[k - 1].Et / peaks[k].Et);
    worst = std::min({worst, oE, op, ot});
    orders += fmt::format(" [{:g}->{:g}: E {:.2f}, p {:.2f}, Et {:.2f}]",
                          steps[k - 1], steps[k], oE, op, ot);
  }
  report("C6", worst >= order_tol,
         fmt::format("FBLC RLC balance residual order on t in ({:g},{:g}] s:{} "
                     "min={:.2f} tol>={:g}; round-off floor for t>={:g} s at "
                     "h={:g}: {:.1e}",
                     t_lo, t_hi, orders, worst, order_tol, floor_lo, steps[0],
                     floor));

  // Sum-zero residual with exact exchange, every shipped zero-delay family.
  double tel_all = tel;
  for (const char* f : {"gen_sigmoid_fblc.yaml", "rlc_const_smc.yaml",
                        "rlc_const_proportional.yaml"}) {
    const SimResult r = simulate(scenario(f));
    tel_all = std::max(tel_all, r.residuals.tellegen_P_relative);
  }
  report("C6", tel_all <= tel_tol,
         fmt::format("Tellegen P residual, zero delay: max relative={:.2e} tol={:.0e}",
                     tel_all, tel_tol));
}

void criterion_7() {
  // (a) settling on the RLC constant-load scenario.
  {
    const Scenario f = scenario("rlc_const_fblc.yaml");
    const Scenario s = scenario("rlc_const_smc.yaml");
    auto jf = std::async(std::launch::async, run, f);
    const SimResult rs = simulate(s);
    const SimResult rf = jf.get();
    const Metrics mf = compute_metrics(rf.traj, f.y_ref, f.window_fraction);
    const Metrics ms = compute_metrics(rs.traj, s.y_ref, s.window_fraction);
    report("C7", rf.ok() && rs.ok() && ms.settled_span && mf.settled_span &&
                     ms.settling_time_2pct_span <= mf.settling_time_2pct_span,
           fmt::format("RLC const: settling (2% of step span) SMC={:.4f} s <= "
                       "FBLC={:.4f} s; 2%-of-setpoint band: SMC={:.4f} FBLC={:.4f} h={:g}",
                       ms.settling_time_2pct_span, mf.settling_time_2pct_span,
                       ms.settling_time_2pct, mf.settling_time_2pct, f.step));
  }
  // (b, d) time-varying RLC family.
  {
    std::map<std::string, Metrics> m;
    std::vector<std::pair<std::string, std::future<SimResult>>> jobs;
    std::vector<Scenario> scns;
    for (const char* c : {"fblc", "smc", "brayton_moser"}) {
      scns.push_back(scenario("rlc_tv_fblc.yaml", {std::string("controller.kind=") + c}));
    }
    bool ok = true;
    for (auto& s : scns) {
      jobs.emplace_back(std::string(to_string(s.controller.kind)),
                        std::async(std::launch::async, run, s));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const SimResult r = jobs[k].second.get();
      ok = ok && r.ok();
      m[jobs[k].first] = compute_metrics(r.traj, scns[k].y_ref, scns[k].window_fraction);
    }
    const auto& bm = m["brayton_moser"];
    report("C7", ok && bm.overshoot > m["fblc"].overshoot &&
                     bm.overshoot > m["smc"].overshoot,
           fmt::format("RLC time-varying: overshoot BM={:.3e} > FBLC={:.3e}, "
                       "SMC={:.3e} h={:g}",
                       bm.overshoot, m["fblc"].overshoot, m["smc"].overshoot,
                       scns.front().step));
    report("C7", ok &&
                     m["fblc"].control_total_variation <= bm.control_total_variation &&
                     m["smc"].control_total_variation <= bm.control_total_variation,
           fmt::format("RLC time-varying: control total variation FBLC={:.4f}, "
                       "SMC={:.4f} <= BM={:.4f} V",
                       m["fblc"].control_total_variation,
                       m["smc"].control_total_variation,
                       bm.control_total_variation));
  }
  // (c) generator family.
  {
    constexpr double tol = 1e-3;
    std::map<std::string, double> sse;
    bool ok = true;
    std::vector<std::pair<std::string, Scenario>> cases{
        {"droop", scenario("gen_sigmoid_droop.yaml")},
        {"fblc", scenario("gen_sigmoid_fblc.yaml")},
        {"smc", scenario("gen_sigmoid_smc.yaml")},
    };
    std::vector<std::future<SimResult>> jobs;
    for (const auto& c : cases) jobs.push_back(std::async(std::launch::async, run, c.second));
    for (std::size_t k = 0; k < cases.size(); ++k) {
      const SimResult r = jobs[k].get();
      ok = ok && r.ok();
      const Scenario& s = cases[k].second;
      sse[cases[k].first] =
          compute_metrics(r.traj, s.y_ref, s.window_fraction).steady_state_error /
          s.y_ref;
    }
    report("C7", ok && sse["droop"] > 0 && sse["fblc"] <= tol && sse["smc"] <= tol,
           fmt::format("generator: relative steady-state error droop={:.3e} > 0; "
                       "FBLC={:.1e}, SMC={:.1e} <= {:.0e}",
                       sse["droop"], sse["fblc"], sse["smc"], tol));
  }
}

struct SweepPoint {
  double value;
  long condition_violations;
  bool certificate_failed;
};

std::vector<SweepPoint> sweep(const std::string& file, const std::string& key,
                              const std::vector<double>& values) {
  std::vector<std::future<SweepPoint>> jobs;
  for (double v : values) {
    jobs.push_back(std::async(std::launch::async, [=] {
      const Scenario s = scenario(file, {fmt::format("{}={}", key, v)});
      const SimResult r = simulate(s);
      if (!r.ok()) return SweepPoint{v, 0, true};
      const auto c = certificate_for(s, r.traj);
      return SweepPoint{v, c->condition_violations, !c->passed()};
    }));
  }
  std::vector<SweepPoint> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

void criterion_8() {
  struct Design {
    std::string name, file, key;
    std::vector<double> values;
  };
  const std::vector<Design> designs{
      {"FBLC injected |Qdot_m| = gain*|e_p|", "stress_fblc_error_feedback.yaml",
       "disturbance.gain", {0, 4, 8, 12, 16, 20}},
      {"SMC report delay [steps]", "stress_smc_delay.yaml", "interconnect.delay_steps",
       {0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50}},
  };
  for (const auto& d : designs) {
    const auto pts = sweep(d.file, d.key, d.values);
    long first_cond = -1, first_cert = -1;
    std::string trace;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (first_cond < 0 && pts[k].condition_violations > 0) first_cond = k;
      if (first_cert < 0 && pts[k].certificate_failed) first_cert = k;
      trace += fmt::format(" {:g}:{}{}", pts[k].value,
                           pts[k].condition_violations > 0 ? "c" : "-",
                           pts[k].certificate_failed ? "X" : "-");
    }
    const bool found = first_cond >= 0 && first_cert >= 0;
    const bool ok = found && std::abs(first_cond - first_cert) <= 1;
    auto at = [&](long k) {
      return k < 0 ? std::string("none") : fmt::format("{:g}", pts[k].value);
    };
    report("C8", ok,
           fmt::format("{}: condition onset={} certificate onset={} (tolerance one "
                       "grid step) grid [value:condition/certificate]{}",
                       d.name, at(first_cond), at(first_cert), trace));
  }
}

}  // namespace

int main() {
  std::printf("acceptance criteria (ENSPACE %s)\n", ENSPACE_VERSION_STRING);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();

  int unexpected = 0, passed = 0;
  for (const auto& o : g_outcomes) {
    if (o.pass) {
      ++passed;
    } else if (kKnownRed.count(o.id) == 0) {
      ++unexpected;
    } else {
      std::printf("note: %s fails as recorded: %s\n", o.id.c_str(),
                  kKnownRed.at(o.id).c_str());
    }
  }
  std::printf("summary: %d/%zu checks passed\n", passed, g_outcomes.size());
  return unexpected == 0 ? 0 : 1;
}
