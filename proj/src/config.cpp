#include "fluorospec/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fluorospec/errors.hpp"

namespace fluorospec::cli {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_plain(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing characters");
  return x;
}

const char* const kKeys[] = {"gamma",  "omega_rabi", "delta_omega", "n_bar",   "k_d",
                             "alpha1_sq", "alpha2_sq", "theta1",   "theta2",  "c",
                             "phi",    "dt",         "t_final",    "t_burn",  "n_traj",
                             "seed",   "mu_min",     "mu_max",     "mu_count"};

void apply_key(RunConfig& cfg, const std::string& key, double value, const std::string& raw) {
  if (key == "dt") cfg.sim.dt = value;
  else if (key == "t_final") cfg.sim.t_final = value;
  else if (key == "t_burn") cfg.sim.t_burn = value;
  else if (key == "n_traj") cfg.sim.n_traj = static_cast<int>(std::llround(value));
  else if (key == "seed") cfg.sim.seed = static_cast<std::uint64_t>(std::stoull(raw));
  else if (key == "mu_min") cfg.grid.mu_min = value;
  else if (key == "mu_max") cfg.grid.mu_max = value;
  else if (key == "mu_count") cfg.grid.mu_count = static_cast<int>(std::llround(value));
  else model::set_param(cfg.params, key, value);
}
}  // namespace

double parse_number(const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw std::invalid_argument("empty value");
  const std::size_t pos = v.find("pi");
  if (pos == std::string::npos) return parse_plain(v);

  // [factor *] pi [/ divisor], with an optional leading sign on the factor.
  std::string pre = trim(v.substr(0, pos));
  std::string post = trim(v.substr(pos + 2));
  double factor = 1.0;
  if (pre == "-") factor = -1.0;
  else if (!pre.empty()) {
    if (pre.back() == '*') pre = trim(pre.substr(0, pre.size() - 1));
    else throw std::invalid_argument("expected '*' between factor and pi");
    factor = parse_plain(pre);
  }
  double divisor = 1.0;
  if (!post.empty()) {
    if (post.front() != '/') throw std::invalid_argument("expected '/' after pi");
    divisor = parse_plain(trim(post.substr(1)));
    if (divisor == 0.0) throw std::invalid_argument("division by zero");
  }
  return factor * kPi / divisor;
}

std::vector<double> GridSpec::grid() const {
  check();
  std::vector<double> g(mu_count);
  for (int i = 0; i < mu_count; ++i)
    g[i] = mu_min + (mu_max - mu_min) * i / (mu_count - 1);
  return g;
}

void GridSpec::check() const {
  if (mu_count < 2) throw ValidationError("grid: mu_count must be >= 2");
  if (!(mu_max > mu_min)) throw ValidationError("grid: mu_max must exceed mu_min");
  if (!std::isfinite(mu_min) || !std::isfinite(mu_max))
    throw ValidationError("grid: bounds must be finite");
}

RunConfig parse_config(const std::string& text, const RunConfig& base) {
  RunConfig cfg = base;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw ParseError(lineno, "unknown key '" + key + "'");
    try {
      apply_key(cfg, key, parse_number(value), value);
    } catch (const std::exception& e) {
      throw ParseError(lineno, "bad value for '" + key + "': " + e.what());
    }
  }
  cfg.params.check();
  cfg.sim.check();
  cfg.grid.check();
  return cfg;
}

RunConfig parse_config(const std::string& text) { return parse_config(text, RunConfig{}); }

std::string render_config(const RunConfig& cfg) {
  char buf[64];
  std::ostringstream out;
  auto emit = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << " = " << buf << "\n";
  };
  emit("gamma", cfg.params.gamma);
  emit("omega_rabi", cfg.params.omega_rabi);
  emit("delta_omega", cfg.params.delta_omega);
  emit("n_bar", cfg.params.n_bar);
  emit("k_d", cfg.params.k_d);
  emit("alpha1_sq", cfg.params.alpha1_sq());
  emit("alpha2_sq", cfg.params.alpha2_sq());
  emit("theta1", cfg.params.theta1);
  emit("theta2", cfg.params.theta2);
  emit("c", cfg.params.c);
  emit("phi", cfg.params.phi);
  emit("dt", cfg.sim.dt);
  emit("t_final", cfg.sim.t_final);
  emit("t_burn", cfg.sim.t_burn);
  out << "n_traj = " << cfg.sim.n_traj << "\n";
  out << "seed = " << cfg.sim.seed << "\n";
  emit("mu_min", cfg.grid.mu_min);
  emit("mu_max", cfg.grid.mu_max);
  out << "mu_count = " << cfg.grid.mu_count << "\n";
  return out.str();
}

namespace {
RunConfig figure_base() {
  RunConfig cfg;
  cfg.params.gamma = 1.0;
  cfg.params.alpha1_abs = std::sqrt(0.45);
  cfg.params.alpha2_abs = std::sqrt(0.45);
  cfg.params.n_bar = 0.0;
  cfg.params.k_d = 0.0;
  return cfg;
}
}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "fig1_case1", "fig1_case2", "fig1_case3", "fig1_case4",
      "fig2_case1", "fig2_case2", "fig2_case3", "fig2_case4",
      "fig3_nofeedback", "fig3_feedback", "dark_state"};
  return names;
}

RunConfig preset(const std::string& name) {
  std::string base_name = name;
  bool conjugate = false;
  if (name.rfind("fig2_", 0) == 0) {
    base_name = "fig1_" + name.substr(5);
    conjugate = true;
  }

  RunConfig cfg = figure_base();
  cfg.preset = name;
  if (base_name == "fig1_case1") {
    cfg.params.delta_omega = 0.0;
    cfg.params.c = 0.0;
    cfg.params.omega_rabi = 0.2976;
    cfg.params.theta2 = -kPi / 2.0;
  } else if (base_name == "fig1_case2") {
    cfg.params.delta_omega = 1.8195;
    cfg.params.c = 0.0;
    cfg.params.omega_rabi = 1.7988;
    cfg.params.theta2 = -0.1438;
  } else if (base_name == "fig1_case3") {
    cfg.params.delta_omega = 0.0;
    cfg.params.c = 0.0896;
    cfg.params.omega_rabi = 0.2698;
    cfg.params.theta1 = kPi / 2.0;
    cfg.params.theta2 = -kPi / 2.0;
    cfg.params.phi = 0.0;
  } else if (base_name == "fig1_case4") {
    cfg.params.delta_omega = 1.6920;
    cfg.params.c = 0.1326;
    cfg.params.omega_rabi = 1.9276;
    cfg.params.theta1 = 2.8168;
    cfg.params.theta2 = -0.0851;
    cfg.params.phi = 1.2460;
  } else if (base_name == "fig3_nofeedback" || base_name == "fig3_feedback") {
    cfg.params.omega_rabi = 2.0;
    cfg.params.delta_omega = 0.0;
    cfg.params.phi = kPi / 2.0;
    cfg.params.theta1 = kPi;
    cfg.params.theta2 = 0.0;
    cfg.params.c = base_name == "fig3_feedback" ? std::sqrt(0.45) / 2.0 : 0.0;
  } else if (base_name == "dark_state") {
    cfg.params.omega_rabi = 0.0;
    cfg.params.delta_omega = 0.0;
    cfg.params.c = 0.0;
  } else {
    throw ParseError("unknown preset '" + name + "'");
  }
  if (conjugate) cfg.params.theta2 += kPi / 2.0;
  return cfg;
}

}  // namespace fluorospec::cli
