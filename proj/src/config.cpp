#include "enspace/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "enspace/errors.hpp"
#include "enspace/report.hpp"

namespace enspace {
namespace {

using Keys = std::set<std::string>;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const YAML::Node& node, const std::string& path,
                const Keys& allowed) {
  if (!node.IsMap()) throw ConfigError(path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ConfigError(join(path, key), "unknown key");
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw ConfigError(path, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    if constexpr (std::is_same_v<T, double>) {
      throw ConfigError(path, "expected a number, got '" + node.Scalar() + "'");
    } else if constexpr (std::is_integral_v<T>) {
      throw ConfigError(path, "expected an integer, got '" + node.Scalar() + "'");
    } else {
      throw ConfigError(path, "invalid value '" + node.Scalar() + "'");
    }
  }
}

template <class T>
void read(const YAML::Node& parent, const std::string& path,
          const std::string& key, T& out) {
  const YAML::Node n = parent[key];
  if (n) out = scalar<T>(n, join(path, key));
}

template <class T>
void read_opt(const YAML::Node& parent, const std::string& path,
              const std::string& key, std::optional<T>& out) {
  const YAML::Node n = parent[key];
  if (n && !n.IsNull()) out = scalar<T>(n, join(path, key));
}

std::vector<double> number_list(const YAML::Node& node,
                                const std::string& path) {
  if (!node || !node.IsSequence()) {
    throw ConfigError(path, "expected a list of numbers");
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    out.push_back(scalar<double>(node[k], path + "." + std::to_string(k)));
  }
  return out;
}

const YAML::Node require(const YAML::Node& parent, const std::string& path,
                         const std::string& key) {
  const YAML::Node n = parent[key];
  if (!n) throw ConfigError(join(path, key), "missing required key");
  return n;
}

// --- overrides -----------------------------------------------------------------

bool is_index(const std::string& s) {
  return !s.empty() &&
         s.find_first_not_of("0123456789") == std::string::npos;
}

void set_path(YAML::Node node, const std::vector<std::string>& segs,
              std::size_t i, const YAML::Node& value, const std::string& key) {
  const std::string& seg = segs[i];
  const bool last = i + 1 == segs.size();
  if (node.IsSequence()) {
    if (!is_index(seg)) throw ConfigError(key, "'" + seg + "' is not a list index");
    const std::size_t idx = std::stoul(seg);
    if (idx >= node.size()) {
      throw ConfigError(key, "index " + seg + " out of range");
    }
    if (last) {
      node[idx] = value;
    } else {
      set_path(node[idx], segs, i + 1, value, key);
    }
    return;
  }
  if (!node.IsMap() && !node.IsNull()) {
    throw ConfigError(key, "cannot descend into a scalar at '" + seg + "'");
  }
  if (last) {
    node[seg] = value;
    return;
  }
  if (!node[seg]) node[seg] = YAML::Node(YAML::NodeType::Map);
  set_path(node[seg], segs, i + 1, value, key);
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  std::vector<std::string> segs;
  std::stringstream ss(key);
  for (std::string s; std::getline(ss, s, '.');) {
    if (s.empty()) throw ConfigError(key, "empty path segment");
    segs.push_back(s);
  }
  YAML::Node value;
  try {
    value = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(key, std::string("unparsable value: ") + e.what());
  }
  set_path(root, segs, 0, value, key);
}

// --- sections ------------------------------------------------------------------

void read_plant(const YAML::Node& n, Scenario& s) {
  const std::string path = "plant";
  check_keys(n, path, {"kind", "params", "initial_state", "y_ref"});
  const auto kind = scalar<std::string>(require(n, path, "kind"), "plant.kind");
  if (kind == "rlc") {
    s.plant = PlantKind::rlc;
    s.x0 = {12.8, 79.0};
    s.y_ref = 80.0;
  } else if (kind == "generator") {
    s.plant = PlantKind::generator;
    s.x0 = {373.23, 1000.0};
    s.y_ref = 377.0;
  } else {
    throw ConfigError("plant.kind", "expected rlc or generator, got '" + kind + "'");
  }
  if (const YAML::Node p = n["params"]) {
    const std::string pp = "plant.params";
    if (s.plant == PlantKind::rlc) {
      check_keys(p, pp, {"R1", "L1", "C1", "v_min"});
      read(p, pp, "R1", s.rlc.R1);
      read(p, pp, "L1", s.rlc.L1);
      read(p, pp, "C1", s.rlc.C1);
      read(p, pp, "v_min", s.rlc.v_min);
    } else {
      check_keys(p, pp, {"J1", "D1", "Tt", "Kt", "omega_min"});
      read(p, pp, "J1", s.gen.J1);
      read(p, pp, "D1", s.gen.D1);
      read(p, pp, "Tt", s.gen.Tt);
      read(p, pp, "Kt", s.gen.Kt);
      read(p, pp, "omega_min", s.gen.omega_min);
    }
  }
  if (const YAML::Node x0 = n["initial_state"]) {
    const auto v = number_list(x0, "plant.initial_state");
    if (v.size() != 2) {
      throw ConfigError("plant.initial_state", "expected two values");
    }
    s.x0 = {v[0], v[1]};
  }
  read(n, path, "y_ref", s.y_ref);
}

LoadProfile read_load(const YAML::Node& n, const std::string& path,
                      const std::filesystem::path& base_dir) {
  const auto kind = scalar<std::string>(require(n, path, "kind"), path + ".kind");
  try {
    if (kind == "constant") {
      check_keys(n, path, {"kind", "P"});
      return LoadProfile::constant(
          scalar<double>(require(n, path, "P"), path + ".P"));
    }
    if (kind == "sigmoid") {
      check_keys(n, path, {"kind", "P0", "dP", "k", "t0"});
      auto get = [&](const char* k) {
        return scalar<double>(require(n, path, k), join(path, k));
      };
      return LoadProfile::sigmoid_step(get("P0"), get("dP"), get("k"), get("t0"));
    }
    if (kind == "piecewise_linear") {
      check_keys(n, path, {"kind", "t", "P"});
      return LoadProfile::piecewise_linear(number_list(n["t"], path + ".t"),
                                           number_list(n["P"], path + ".P"));
    }
    if (kind == "tabulated") {
      check_keys(n, path, {"kind", "file", "t", "P"});
      if (n["file"]) {
        if (n["t"] || n["P"]) {
          throw ConfigError(path, "give either file or t/P, not both");
        }
        std::filesystem::path file =
            scalar<std::string>(n["file"], path + ".file");
        if (file.is_relative()) file = base_dir / file;
        return LoadProfile::tabulated_file(file);
      }
      return LoadProfile::tabulated(number_list(n["t"], path + ".t"),
                                    number_list(n["P"], path + ".P"));
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + ".kind", "unknown load kind '" + kind + "'");
}

void read_controller(const YAML::Node& n, Scenario& s) {
  const std::string path = "controller";
  check_keys(n, path,
             {"kind", "initial_input", "pdot_ref", "pdot_filter_tau", "i_min",
              "fblc", "smc", "proportional", "brayton_moser", "droop"});
  auto& c = s.controller;
  const auto kind = scalar<std::string>(require(n, path, "kind"), "controller.kind");
  const auto k = controller_from_string(kind);
  if (!k) throw ConfigError("controller.kind", "unknown controller '" + kind + "'");
  c.kind = *k;
  if (s.plant == PlantKind::generator) c.smc = SmcGains{10.0, 1.0, 0.0};
  read_opt(n, path, "initial_input", c.initial_input);
  if (const YAML::Node m = n["pdot_ref"]) {
    const auto mode = scalar<std::string>(m, "controller.pdot_ref");
    if (mode == "analytic") {
      c.pdot_ref = PdotRefMode::analytic;
    } else if (mode == "filtered") {
      c.pdot_ref = PdotRefMode::filtered;
    } else {
      throw ConfigError("controller.pdot_ref", "expected analytic or filtered");
    }
  }
  std::optional<double> tau;
  read_opt(n, path, "pdot_filter_tau", tau);
  c.pdot_filter_tau = tau.value_or(10.0 * s.step);
  read(n, path, "i_min", c.i_min);

  if (const YAML::Node g = n["fblc"]) {
    check_keys(g, "controller.fblc", {"K1", "K2"});
    read(g, "controller.fblc", "K1", c.fblc.K1);
    read(g, "controller.fblc", "K2", c.fblc.K2);
  }
  if (const YAML::Node g = n["smc"]) {
    check_keys(g, "controller.smc", {"M0", "M1", "eps_bl"});
    read(g, "controller.smc", "M0", c.smc.M0);
    read(g, "controller.smc", "M1", c.smc.M1);
    read(g, "controller.smc", "eps_bl", c.smc.eps_bl);
  }
  if (const YAML::Node g = n["proportional"]) {
    check_keys(g, "controller.proportional", {"Ki", "Kv"});
    read(g, "controller.proportional", "Ki", c.proportional.Ki);
    read(g, "controller.proportional", "Kv", c.proportional.Kv);
  }
  if (const YAML::Node g = n["brayton_moser"]) {
    const std::string gp = "controller.brayton_moser";
    check_keys(g, gp, {"N1", "N2", "N3", "Pi"});
    read(g, gp, "N1", c.brayton_moser.N1);
    read(g, gp, "N2", c.brayton_moser.N2);
    read(g, gp, "N3", c.brayton_moser.N3);
    read(g, gp, "Pi", c.brayton_moser.Pi);
  }
  if (const YAML::Node g = n["droop"]) {
    check_keys(g, "controller.droop", {"Tg", "r"});
    read(g, "controller.droop", "Tg", c.droop.Tg);
    read(g, "controller.droop", "r", c.droop.r);
  }
}

void read_disturbance(const YAML::Node& n, DisturbanceChannel& d) {
  const std::string path = "disturbance";
  check_keys(n, path, {"mode", "offset", "amplitude", "omega", "phase", "gain"});
  if (const YAML::Node m = n["mode"]) {
    const auto mode = scalar<std::string>(m, "disturbance.mode");
    if (mode == "zero") {
      d.mode = DisturbanceMode::zero;
    } else if (mode == "signal") {
      d.mode = DisturbanceMode::signal;
    } else if (mode == "error_feedback") {
      d.mode = DisturbanceMode::error_feedback;
    } else {
      throw ConfigError("disturbance.mode",
                        "expected zero, signal or error_feedback");
    }
  }
  read(n, path, "offset", d.offset);
  read(n, path, "amplitude", d.amplitude);
  read(n, path, "omega", d.omega);
  read(n, path, "phase", d.phase);
  read(n, path, "gain", d.gain);
}

Scenario scenario_from_node(const YAML::Node& root,
                            const std::filesystem::path& base_dir) {
  if (!root.IsMap()) throw ConfigError("<root>", "expected a mapping");
  check_keys(root, "",
             {"name", "seed", "plant", "loads", "controller", "interconnect",
              "disturbance", "simulation", "metrics", "certificate"});
  Scenario s;
  read(root, "", "name", s.name);
  read(root, "", "seed", s.seed);

  // Simulation first: the filter time constant defaults to a multiple of h.
  if (const YAML::Node n = root["simulation"]) {
    check_keys(n, "simulation", {"step", "horizon", "record_every"});
    read(n, "simulation", "step", s.step);
    read(n, "simulation", "horizon", s.horizon);
    read(n, "simulation", "record_every", s.record_every);
  }
  read_plant(require(root, "", "plant"), s);
  if (const YAML::Node n = root["loads"]) {
    if (!n.IsSequence()) throw ConfigError("loads", "expected a list");
    for (std::size_t k = 0; k < n.size(); ++k) {
      s.loads.push_back(read_load(n[k], "loads." + std::to_string(k), base_dir));
    }
  }
  read_controller(require(root, "", "controller"), s);
  if (const YAML::Node n = root["interconnect"]) {
    check_keys(n, "interconnect", {"delay_steps"});
    read(n, "interconnect", "delay_steps", s.delay_steps);
  }
  if (const YAML::Node n = root["disturbance"]) read_disturbance(n, s.disturbance);
  if (const YAML::Node n = root["metrics"]) {
    check_keys(n, "metrics", {"window_fraction"});
    read(n, "metrics", "window_fraction", s.window_fraction);
  }
  if (const YAML::Node n = root["certificate"]) {
    check_keys(n, "certificate", {"smc_mbar"});
    read_opt(n, "certificate", "smc_mbar", s.smc_mbar);
  }

  try {
    s.validate();
  } catch (const InvalidInput& e) {
    // Validation messages start with the offending key when there is one.
    const std::string what = e.what();
    const auto space = what.find(' ');
    const std::string head = what.substr(0, space);
    if (head.find('.') != std::string::npos) {
      throw ConfigError(head, what.substr(space + 1));
    }
    throw ConfigError(head == "disturbance" ? "disturbance" : "<scenario>", what);
  }
  try {
    // Building the law catches controller/plant mismatches and bad gains.
    const auto plant = make_component(s);
    (void)make_control_law(s.controller, *plant, s.y_ref);
  } catch (const InvalidInput& e) {
    throw ConfigError("controller", e.what());
  }
  return s;
}

std::string list_text(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k > 0) out += ", ";
    out += format_double(v[k]);
  }
  return out + "]";
}

}  // namespace

Scenario scenario_from_text(const std::string& text,
                            const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  return scenario_from_node(root, base_dir);
}

Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_text(buf.str(), path.parent_path(), overrides);
}

std::string scenario_to_text(const Scenario& s) {
  auto f = [](double v) { return format_double(v); };
  std::string o;
  o += fmt::format("name: \"{}\"\nseed: {}\n", s.name, s.seed);
  o += "plant:\n";
  o += fmt::format("  kind: {}\n", to_string(s.plant));
  if (s.plant == PlantKind::rlc) {
    o += fmt::format("  params: {{R1: {}, L1: {}, C1: {}, v_min: {}}}\n",
                     f(s.rlc.R1), f(s.rlc.L1), f(s.rlc.C1), f(s.rlc.v_min));
  } else {
    o += fmt::format(
        "  params: {{J1: {}, D1: {}, Tt: {}, Kt: {}, omega_min: {}}}\n",
        f(s.gen.J1), f(s.gen.D1), f(s.gen.Tt), f(s.gen.Kt),
        f(s.gen.omega_min));
  }
  o += fmt::format("  initial_state: [{}, {}]\n", f(s.x0[0]), f(s.x0[1]));
  o += fmt::format("  y_ref: {}\n", f(s.y_ref));

  o += s.loads.empty() ? "loads: []\n" : "loads:\n";
  for (const auto& l : s.loads) {
    struct Emit {
      std::string& o;
      void operator()(const LoadProfile::Constant& c) const {
        o += fmt::format("  - {{kind: constant, P: {}}}\n", format_double(c.P));
      }
      void operator()(const LoadProfile::Sigmoid& g) const {
        o += fmt::format("  - {{kind: sigmoid, P0: {}, dP: {}, k: {}, t0: {}}}\n",
                         format_double(g.P0), format_double(g.dP),
                         format_double(g.k), format_double(g.t0));
      }
      void operator()(const LoadProfile::Linear& g) const {
        o += fmt::format("  - kind: piecewise_linear\n    t: {}\n    P: {}\n",
                         list_text(g.t), list_text(g.P));
      }
      void operator()(const LoadProfile::Tabulated& g) const {
        o += fmt::format("  - kind: tabulated\n    t: {}\n    P: {}\n",
                         list_text(g.t), list_text(g.P));
      }
    };
    std::visit(Emit{o}, l.data());
  }

  const auto& c = s.controller;
  o += "controller:\n";
  o += fmt::format("  kind: {}\n", to_string(c.kind));
  o += fmt::format("  initial_input: {}\n",
                   c.initial_input ? f(*c.initial_input) : std::string("null"));
  o += fmt::format("  pdot_ref: {}\n",
                   c.pdot_ref == PdotRefMode::analytic ? "analytic" : "filtered");
  o += fmt::format("  pdot_filter_tau: {}\n", f(c.pdot_filter_tau));
  o += fmt::format("  i_min: {}\n", f(c.i_min));
  o += fmt::format("  fblc: {{K1: {}, K2: {}}}\n", f(c.fblc.K1), f(c.fblc.K2));
  o += fmt::format("  smc: {{M0: {}, M1: {}, eps_bl: {}}}\n", f(c.smc.M0),
                   f(c.smc.M1), f(c.smc.eps_bl));
  o += fmt::format("  proportional: {{Ki: {}, Kv: {}}}\n",
                   f(c.proportional.Ki), f(c.proportional.Kv));
  o += fmt::format("  brayton_moser: {{N1: {}, N2: {}, N3: {}, Pi: {}}}\n",
                   f(c.brayton_moser.N1), f(c.brayton_moser.N2),
                   f(c.brayton_moser.N3), f(c.brayton_moser.Pi));
  o += fmt::format("  droop: {{Tg: {}, r: {}}}\n", f(c.droop.Tg), f(c.droop.r));

  o += fmt::format("interconnect:\n  delay_steps: {}\n", s.delay_steps);
  const auto& d = s.disturbance;
  o += fmt::format(
      "disturbance:\n  mode: {}\n  offset: {}\n  amplitude: {}\n  omega: {}\n"
      "  phase: {}\n  gain: {}\n",
      to_string(d.mode), f(d.offset), f(d.amplitude), f(d.omega), f(d.phase),
      f(d.gain));
  o += fmt::format(
      "simulation:\n  step: {}\n  horizon: {}\n  record_every: {}\n", f(s.step),
      f(s.horizon), s.record_every);
  o += fmt::format("metrics:\n  window_fraction: {}\n", f(s.window_fraction));
  o += fmt::format("certificate:\n  smc_mbar: {}\n",
                   s.smc_mbar ? f(*s.smc_mbar) : std::string("null"));
  return o;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", md[k]);
  return hex;
}

}  // namespace enspace
