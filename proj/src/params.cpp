#include "wbr/params.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace wbr {

namespace {

struct KeyEntry {
  const char* name;
  double* d = nullptr;
  int* i = nullptr;
};

// One flat table of every recognized config key. Unknown keys are rejected
// so typos surface immediately instead of silently keeping a default.
std::vector<KeyEntry> key_table(RobotParams& p, ControllerGains& g) {
  return {
      {"robot.m_H", &p.m_H},
      {"robot.m_L", &p.m_L},
      {"robot.m_w", &p.m_w},
      {"robot.I_H", &p.I_H},
      {"robot.I_L", &p.I_L},
      {"robot.I_w", &p.I_w},
      {"robot.l", &p.l},
      {"robot.beta0", &p.beta0},
      {"robot.L_link", &p.L_link},
      {"robot.L1", &p.L1},
      {"robot.R", &p.R},
      {"robot.L_w_frac", &p.L_w_frac},
      {"robot.g", &p.g},
      {"robot.track_width", &p.track_width},
      {"robot.I_yaw", &p.I_yaw},
      {"robot.I_roll", &p.I_roll},
      {"robot.tau_max", &p.tau_max},
      {"robot.encoder_counts", nullptr, &p.encoder_counts},
      {"lqr.q_gamma", &g.Q_diag[0]},
      {"lqr.q_theta", &g.Q_diag[1]},
      {"lqr.q_x", &g.Q_diag[2]},
      {"lqr.q_gamma_dot", &g.Q_diag[3]},
      {"lqr.q_theta_dot", &g.Q_diag[4]},
      {"lqr.q_x_dot", &g.Q_diag[5]},
      {"lqr.q_int_gamma", &g.Q_diag[6]},
      {"lqr.q_int_x", &g.Q_diag[7]},
      {"lqr.r_tau_hip", &g.R_diag[0]},
      {"lqr.r_tau_wheel", &g.R_diag[1]},
      {"lqr.schedule_points", nullptr, &g.schedule_points},
      {"lqr.schedule_min_leg", &g.schedule_min_leg},
      {"lqr.schedule_max_leg", &g.schedule_max_leg},
      {"gains.kp_height", &g.kp_height},
      {"gains.kd_height", &g.kd_height},
      {"gains.kp_roll", &g.kp_roll},
      {"gains.kd_roll", &g.kd_roll},
      {"gains.kp_split", &g.kp_split},
      {"gains.kd_split", &g.kd_split},
      {"gains.q_yaw", &g.Q_yaw_diag[0]},
      {"gains.q_yaw_rate", &g.Q_yaw_diag[1]},
      {"gains.r_yaw", &g.R_yaw},
      {"loop.control_dt", &g.control_dt},
      {"loop.physics_dt", &g.physics_dt},
      {"estimator.filter_alpha", &g.filter_alpha},
      {"estimator.filter_bias_gain", &g.filter_bias_gain},
  };
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be strictly positive");
}

void require_nonneg(double v, const char* field) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be non-negative");
}

}  // namespace

void RobotParams::validate() const {
  require_positive(m_H, "m_H");
  require_positive(m_L, "m_L");
  require_positive(m_w, "m_w");
  require_positive(I_H, "I_H");
  require_positive(I_L, "I_L");
  require_positive(I_w, "I_w");
  require_nonneg(l, "l");
  require_positive(L_link, "L_link");
  require_positive(L1, "L1");
  require_positive(R, "R");
  require_positive(g, "g");
  require_positive(track_width, "track_width");
  require_positive(I_yaw, "I_yaw");
  require_positive(I_roll, "I_roll");
  require_positive(tau_max, "tau_max");
  if (!(L_w_frac > 0.0 && L_w_frac < 1.0)) throw ValidationError("L_w_frac", "must lie in (0, 1)");
  if (encoder_counts <= 0) throw ValidationError("encoder_counts", "must be positive");
  if (!std::isfinite(beta0)) throw ValidationError("beta0", "must be finite");
  // The about-CoM rod inertia implied by I_L must stay positive.
  const double Lref = leg_ref_length();
  const double shifted = I_L - rod_mass() * rod_com_from_wheel(Lref) * rod_com_from_wheel(Lref);
  if (!(shifted > 0.0))
    throw ValidationError("I_L", "smaller than the rod parallel-axis term; about-CoM inertia would be non-positive");
}

double RobotParams::rod_com_inertia(double L) const {
  const double Lref = leg_ref_length();
  const double Lm_ref = rod_com_from_wheel(Lref);
  const double com_ref = I_L - rod_mass() * Lm_ref * Lm_ref;
  const double s = L / Lref;
  return com_ref * s * s;
}

void ControllerGains::validate() const {
  static const char* qnames[8] = {"q_gamma",     "q_theta",     "q_x",     "q_gamma_dot",
                                  "q_theta_dot", "q_x_dot",     "q_int_gamma", "q_int_x"};
  for (int k = 0; k < 8; ++k) require_nonneg(Q_diag[k], qnames[k]);
  require_positive(R_diag[0], "r_tau_hip");
  require_positive(R_diag[1], "r_tau_wheel");
  require_nonneg(kp_height, "kp_height");
  require_nonneg(kd_height, "kd_height");
  require_nonneg(kp_roll, "kp_roll");
  require_nonneg(kd_roll, "kd_roll");
  require_nonneg(kp_split, "kp_split");
  require_nonneg(kd_split, "kd_split");
  require_nonneg(Q_yaw_diag[0], "q_yaw");
  require_nonneg(Q_yaw_diag[1], "q_yaw_rate");
  require_positive(R_yaw, "r_yaw");
  require_positive(control_dt, "control_dt");
  require_positive(physics_dt, "physics_dt");
  if (!(filter_alpha >= 0.0 && filter_alpha <= 1.0))
    throw ValidationError("filter_alpha", "must lie in [0, 1]");
  require_nonneg(filter_bias_gain, "filter_bias_gain");
  if (physics_dt > control_dt + 1e-15)
    throw ValidationError("physics_dt", "must not exceed control_dt");
  const double ratio = control_dt / physics_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw ValidationError("control_dt", "must be an integer multiple of physics_dt");
  if (schedule_points < 2) throw ValidationError("schedule_points", "need at least 2 grid points");
  if (!(schedule_min_leg > 0.0) || !(schedule_max_leg > schedule_min_leg))
    throw ValidationError("schedule_min_leg", "schedule span must be positive and increasing");
}

std::pair<RobotParams, ControllerGains> parse_params(const std::string& text) {
  RobotParams p;
  ControllerGains g;
  auto table = key_table(p, g);

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (val.empty()) throw ConfigError(lineno, "empty value for '" + key + "'");

    KeyEntry* entry = nullptr;
    for (auto& e : table)
      if (key == e.name) {
        entry = &e;
        break;
      }
    if (!entry) throw ConfigError(lineno, "unknown key '" + key + "'");

    if (entry->i) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc{} || ptr != val.data() + val.size())
        throw ConfigError(lineno, "expected integer for '" + key + "'");
      *entry->i = v;
    } else {
      char* end = nullptr;
      double v = std::strtod(val.c_str(), &end);
      if (end != val.c_str() + val.size() || !std::isfinite(v))
        throw ConfigError(lineno, "expected number for '" + key + "'");
      *entry->d = v;
    }
  }

  p.validate();
  g.validate();
  return {p, g};
}

std::pair<RobotParams, ControllerGains> load_params(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_params(buf.str());
}

std::string serialize_params(const RobotParams& p_in, const ControllerGains& g_in) {
  RobotParams p = p_in;
  ControllerGains g = g_in;
  auto table = key_table(p, g);
  std::string out = "# wbrsim parameters (SI units, angles in radians)\n";
  char buf[64];
  for (const auto& e : table) {
    if (e.i) {
      std::snprintf(buf, sizeof buf, "%s = %d\n", e.name, *e.i);
    } else {
      std::snprintf(buf, sizeof buf, "%s = %.17g\n", e.name, *e.d);
    }
    out += buf;
  }
  return out;
}

void save_params(const std::string& path, const RobotParams& p, const ControllerGains& g) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << serialize_params(p, g);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wbr
