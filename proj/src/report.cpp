#include "enspace/report.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "enspace/errors.hpp"

namespace enspace {
namespace {

class DocWriter {
 public:
  explicit DocWriter(std::string_view section) {
    out_ += fmt::format("{}:\n", section);
  }
  void num(std::string_view key, double v) {
    out_ += fmt::format("  {}: {}\n", key, format_double(v));
  }
  void count(std::string_view key, long v) {
    out_ += fmt::format("  {}: {}\n", key, v);
  }
  void flag(std::string_view key, bool v) {
    out_ += fmt::format("  {}: {}\n", key, v ? "true" : "false");
  }
  void text(std::string_view key, std::string_view v) {
    // Double-quoted YAML scalar; escape the two characters that matter.
    std::string esc;
    for (char c : v) {
      if (c == '"' || c == '\\') esc += '\\';
      if (c == '\n') {
        esc += "\\n";
        continue;
      }
      esc += c;
    }
    out_ += fmt::format("  {}: \"{}\"\n", key, esc);
  }
  void stats(std::string_view key, const ResidualStats& s) {
    out_ += fmt::format("  {}:\n    max_abs: {}\n    rms: {}\n", key,
                        format_double(s.max_abs), format_double(s.rms));
  }
  std::string str() && { return std::move(out_); }

 private:
  std::string out_;
};

class DocReader {
 public:
  DocReader(const std::string& text, const std::string& section)
      : section_(section) {
    YAML::Node root;
    try {
      root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
      throw ConfigError(section, std::string("unparsable document: ") + e.what());
    }
    if (!root.IsMap() || !root[section]) {
      throw ConfigError(section, "document has no '" + section + "' section");
    }
    node_ = root[section];
  }

  YAML::Node at(const std::string& key) const {
    const YAML::Node n = node_[key];
    if (!n) throw ConfigError(section_ + "." + key, "missing key");
    return n;
  }
  double num(const std::string& key) const {
    try {
      return at(key).as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(section_ + "." + key, "not a number");
    }
  }
  long count(const std::string& key) const {
    try {
      return at(key).as<long>();
    } catch (const YAML::Exception&) {
      throw ConfigError(section_ + "." + key, "not an integer");
    }
  }
  bool flag(const std::string& key) const {
    try {
      return at(key).as<bool>();
    } catch (const YAML::Exception&) {
      throw ConfigError(section_ + "." + key, "not a boolean");
    }
  }
  std::string text(const std::string& key) const {
    return at(key).as<std::string>();
  }
  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
  ResidualStats stats(const std::string& key) const {
    const YAML::Node n = at(key);
    if (!n["max_abs"] || !n["rms"]) {
      throw ConfigError(section_ + "." + key, "needs max_abs and rms");
    }
    return {n["max_abs"].as<double>(), n["rms"].as<double>()};
  }

 private:
  std::string section_;
  YAML::Node node_;
};

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return fmt::format("{}", v);
}

std::string to_document(const Metrics& m) {
  DocWriter w("metrics");
  w.num("steady_state_error", m.steady_state_error);
  w.num("overshoot", m.overshoot);
  w.num("settling_time_2pct", m.settling_time_2pct);
  w.flag("settled", m.settled);
  w.num("settling_time_2pct_span", m.settling_time_2pct_span);
  w.flag("settled_span", m.settled_span);
  w.num("control_effort_l2", m.control_effort_l2);
  w.num("control_total_variation", m.control_total_variation);
  w.num("u_ss", m.u_ss);
  w.num("final_y", m.final_y);
  w.num("final_u", m.final_u);
  w.num("final_x0", m.final_state[0]);
  w.num("final_x1", m.final_state[1]);
  if (m.reaching_time) w.num("reaching_time", *m.reaching_time);
  w.count("certificate_violations", m.certificate_violations);
  return std::move(w).str();
}

Metrics metrics_from_document(const std::string& text) {
  const DocReader r(text, "metrics");
  Metrics m;
  m.steady_state_error = r.num("steady_state_error");
  m.overshoot = r.num("overshoot");
  m.settling_time_2pct = r.num("settling_time_2pct");
  m.settled = r.flag("settled");
  m.settling_time_2pct_span = r.num("settling_time_2pct_span");
  m.settled_span = r.flag("settled_span");
  m.control_effort_l2 = r.num("control_effort_l2");
  m.control_total_variation = r.num("control_total_variation");
  m.u_ss = r.num("u_ss");
  m.final_y = r.num("final_y");
  m.final_u = r.num("final_u");
  m.final_state = {r.num("final_x0"), r.num("final_x1")};
  if (r.has("reaching_time")) m.reaching_time = r.num("reaching_time");
  m.certificate_violations = r.count("certificate_violations");
  return m;
}

std::string to_document(const ResidualReport& rep) {
  DocWriter w("residuals");
  w.count("steps", rep.steps);
  w.stats("energy", rep.energy);
  w.stats("pdot", rep.pdot);
  w.stats("tangent", rep.tangent);
  w.stats("tellegen_P", rep.tellegen_P);
  w.stats("tellegen_Q", rep.tellegen_Q);
  w.stats("tellegen_Pt", rep.tellegen_Pt);
  w.num("tellegen_P_relative", rep.tellegen_P_relative);
  w.stats("gap", rep.gap);
  return std::move(w).str();
}

ResidualReport residuals_from_document(const std::string& text) {
  const DocReader r(text, "residuals");
  ResidualReport rep;
  rep.steps = r.count("steps");
  rep.energy = r.stats("energy");
  rep.pdot = r.stats("pdot");
  rep.tangent = r.stats("tangent");
  rep.tellegen_P = r.stats("tellegen_P");
  rep.tellegen_Q = r.stats("tellegen_Q");
  rep.tellegen_Pt = r.stats("tellegen_Pt");
  rep.tellegen_P_relative = r.num("tellegen_P_relative");
  rep.gap = r.stats("gap");
  return rep;
}

std::string to_document(const CertificateReport& c) {
  DocWriter w("certificate");
  w.text("kind", c.kind == CertificateKind::fblc ? "fblc" : "smc");
  w.flag("passed", c.passed());
  w.count("violations", c.violations());
  w.count("samples", c.samples);
  w.flag("condition_satisfied", c.condition_satisfied());
  w.num("condition_satisfied_fraction", c.condition_satisfied_fraction);
  w.count("condition_violations", c.condition_violations);
  w.num("max_abs_qdot_m", c.max_abs_qdot_m);
  if (c.kind == CertificateKind::fblc) {
    w.count("monotone_violations", c.monotone_violations);
    w.count("vdot_positive", c.vdot_positive);
    w.count("coincident_violations", c.coincident_violations);
    w.num("V0", c.V0);
    w.num("V_final", c.V_final);
    w.num("V_max", c.V_max);
    w.num("ultimate_bound", c.ultimate_bound);
    w.num("final_abs_e_p", c.final_abs_e_p);
  } else {
    w.num("mbar", c.mbar);
    w.num("sigma0", c.sigma0);
    w.flag("reached", c.reached);
    w.num("reaching_time", c.reaching_time);
    w.num("reaching_bound", c.reaching_bound);
    w.num("reaching_tolerance", c.reaching_tolerance);
    w.num("duration", c.duration);
    w.count("vdot_bound_violations", c.vdot_bound_violations);
    w.count("v_increase_violations", c.v_increase_violations);
    w.num("chatter_band", c.chatter_band);
    w.count("band_exits", c.band_exits);
    w.num("max_sigma_after", c.max_sigma_after);
    w.flag("decay_fitted", c.decay_fitted);
    w.num("decay_rate", c.decay_rate);
    w.num("decay_rate_error", c.decay_rate_error);
    w.count("decay_points", c.decay_points);
  }
  return std::move(w).str();
}

CertificateReport certificate_from_document(const std::string& text) {
  const DocReader r(text, "certificate");
  CertificateReport c;
  const std::string kind = r.text("kind");
  if (kind == "fblc") {
    c.kind = CertificateKind::fblc;
  } else if (kind == "smc") {
    c.kind = CertificateKind::smc;
  } else {
    throw ConfigError("certificate.kind", "unknown kind '" + kind + "'");
  }
  c.samples = r.count("samples");
  c.condition_satisfied_fraction = r.num("condition_satisfied_fraction");
  c.condition_violations = r.count("condition_violations");
  c.max_abs_qdot_m = r.num("max_abs_qdot_m");
  if (c.kind == CertificateKind::fblc) {
    c.monotone_violations = r.count("monotone_violations");
    c.vdot_positive = r.count("vdot_positive");
    c.coincident_violations = r.count("coincident_violations");
    c.V0 = r.num("V0");
    c.V_final = r.num("V_final");
    c.V_max = r.num("V_max");
    c.ultimate_bound = r.num("ultimate_bound");
    c.final_abs_e_p = r.num("final_abs_e_p");
  } else {
    c.mbar = r.num("mbar");
    c.sigma0 = r.num("sigma0");
    c.reached = r.flag("reached");
    c.reaching_time = r.num("reaching_time");
    c.reaching_bound = r.num("reaching_bound");
    c.reaching_tolerance = r.num("reaching_tolerance");
    c.duration = r.num("duration");
    c.vdot_bound_violations = r.count("vdot_bound_violations");
    c.v_increase_violations = r.count("v_increase_violations");
    c.chatter_band = r.num("chatter_band");
    c.band_exits = r.count("band_exits");
    c.max_sigma_after = r.num("max_sigma_after");
    c.decay_fitted = r.flag("decay_fitted");
    c.decay_rate = r.num("decay_rate");
    c.decay_rate_error = r.num("decay_rate_error");
    c.decay_points = r.count("decay_points");
  }
  return c;
}

std::string to_document(const RunManifest& m) {
  DocWriter w("manifest");
  w.text("command", m.command);
  w.text("scenario_file", m.scenario_file);
  w.text("output_dir", m.output_dir);
  w.count("seed", static_cast<long>(m.seed));
  w.text("tool_version", m.tool_version);
  w.text("config_hash", m.config_hash);
  w.text("status", m.status);
  w.text("message", m.message);
  return std::move(w).str();
}

RunManifest manifest_from_document(const std::string& text) {
  const DocReader r(text, "manifest");
  RunManifest m;
  m.command = r.text("command");
  m.scenario_file = r.text("scenario_file");
  m.output_dir = r.text("output_dir");
  m.seed = static_cast<std::uint64_t>(r.count("seed"));
  m.tool_version = r.text("tool_version");
  m.config_hash = r.text("config_hash");
  m.status = r.text("status");
  m.message = r.text("message");
  return m;
}

}  // namespace enspace
