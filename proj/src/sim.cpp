#include "wbr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace wbr {

namespace {

constexpr double kLegMin = 0.08;
constexpr double kLegMaxFrac = 0.999;  // keep the knee off the singular lockout
constexpr double kLegForceCap = 2000.0;  // N, axial force limit near lockout

double lerp(double a, double b, double w) { return a + (b - a) * w; }

}  // namespace

double Profile::eval(double x) const {
  if (knots.empty()) return 0.0;
  if (x <= knots.front().first) return knots.front().second;
  if (x >= knots.back().first) return knots.back().second;
  size_t hi = 1;
  while (knots[hi].first < x) ++hi;
  const auto& a = knots[hi - 1];
  const auto& b = knots[hi];
  const double w = (x - a.first) / (b.first - a.first);
  return lerp(a.second, b.second, w);
}

void Scenario::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("scenario: duration must be positive");
  if (segments.empty()) throw std::invalid_argument("scenario: no reference segments");
  double t = 0.0;
  for (const auto& s : segments) {
    if (std::abs(s.t0 - t) > 1e-9)
      throw std::invalid_argument("scenario: segments must be contiguous and sorted");
    if (!(s.t1 > s.t0)) throw std::invalid_argument("scenario: empty segment");
    t = s.t1;
  }
  if (t < duration - 1e-9) throw std::invalid_argument("scenario: segments do not cover duration");
}

ReferenceInput Scenario::reference_at(double t) const {
  const RefSegment* seg = &segments.back();
  for (const auto& s : segments) {
    if (t < s.t1) {
      seg = &s;
      break;
    }
  }
  const double w = std::clamp((t - seg->t0) / (seg->t1 - seg->t0), 0.0, 1.0);
  ReferenceInput r;
  r.gamma_d = lerp(seg->start.gamma_d, seg->end.gamma_d, w);
  r.v_d = lerp(seg->start.v_d, seg->end.v_d, w);
  r.yaw_rate_d = lerp(seg->start.yaw_rate_d, seg->end.yaw_rate_d, w);
  r.psi_d = lerp(seg->start.psi_d, seg->end.psi_d, w);
  r.psi_d_dot = 0.0;
  r.L_leg_d = lerp(seg->start.L_leg_d, seg->end.L_leg_d, w);
  r.L_leg_d_dot = seg->t1 > seg->t0 ? (seg->end.L_leg_d - seg->start.L_leg_d) / (seg->t1 - seg->t0) : 0.0;
  r.L_leg_d_ddot = 0.0;
  if (seg->split_sine) {
    const double om = 2.0 * M_PI * seg->split_freq;
    r.split_d = seg->split_amp * std::sin(om * (t - seg->t0));
    r.split_d_dot = seg->split_amp * om * std::cos(om * (t - seg->t0));
  } else {
    r.split_d = lerp(seg->start.split_d, seg->end.split_d, w);
    r.split_d_dot = 0.0;
  }
  return r;
}

double PlantSim::contact_tilt(double x) const {
  const double h = sc_.side_height.eval(x);
  return std::asin(std::clamp(h / p_.track_width, -1.0, 1.0));
}

double PlantSim::sagittal_slope(double x) const { return sc_.terrain_slope.eval(x); }

FullPlantState PlantSim::step(const FullPlantState& s, const MotorCommands& cmd, double dt) const {
  if (s.termination != Termination::running) return s;
  FullPlantState n = s;

  const double tau_H = cmd.tau_hip_l + cmd.tau_hip_r;
  const double tau_w = cmd.tau_wheel_l + cmd.tau_wheel_r;
  const double slope = sagittal_slope(s.sagittal[2]);
  const double L = s.leg_mean;

  const SagittalAccel acc = sagittal_accel(s.sagittal, tau_H, tau_w, L, p_, slope);
  n.last_qdd = acc.qdd;
  n.last_forces = acc.forces;
  n.sagittal = sagittal_rk4_step(s.sagittal, tau_H, tau_w, L, p_, dt, slope);

  // Yaw: rigid-body axis driven by the wheel torque differential.
  const double dtau_yaw = cmd.tau_wheel_r - cmd.tau_wheel_l;
  const double yaw_dd = p_.track_width / (2.0 * p_.R) * dtau_yaw / p_.I_yaw;
  n.yaw = s.yaw + s.yaw_rate * dt + 0.5 * yaw_dd * dt * dt;
  n.yaw_rate = s.yaw_rate + yaw_dd * dt;

  // Split: antisymmetric leg mode; hip differential drives it, the wheel
  // differential drags it the other way.
  {
    const double L_M = p_.rod_com_from_wheel(L);
    const double I_sp = 0.5 * (p_.rod_com_inertia(L) + p_.rod_mass() * L_M * L_M);
    const double c_g = p_.m_L * p_.g * L_M * std::cos(s.sagittal[1]);
    const double drive = (cmd.tau_hip_l - cmd.tau_hip_r) - dtau_yaw;
    auto f = [&](double q, double qd) {
      (void)qd;
      return (c_g * q + drive) / I_sp;
    };
    const double q = s.split, qd = s.split_rate;
    const double k1 = f(q, qd);
    const double k2 = f(q + 0.5 * dt * qd, qd + 0.5 * dt * k1);
    const double k3 = f(q + 0.5 * dt * qd + 0.25 * dt * dt * k1, qd + 0.5 * dt * k2);
    const double k4 = f(q + dt * qd + 0.5 * dt * dt * k2, qd + dt * k3);
    n.split = q + dt * qd + dt * dt / 6.0 * (k1 + k2 + k3);
    n.split_rate = qd + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // Leg-length axis: each knee loads the head through the leg Jacobian; the
  // symmetric torque component drives the mean length.
  const double sigma2m = sigma2_for_leg_length(L, p_);
  const double J = leg_jacobian(sigma2m, p_);
  {
    const double tau_sym = 0.5 * (cmd.tau_knee_l + cmd.tau_knee_r);
    double F_sym = std::abs(J) > 1e-6 ? tau_sym / J : 0.0;
    F_sym = std::clamp(F_sym, -kLegForceCap, kLegForceCap);
    const double a = F_sym / p_.m_H - p_.g;
    n.leg_mean = L + s.leg_mean_rate * dt + 0.5 * a * dt * dt;
    n.leg_mean_rate = s.leg_mean_rate + a * dt;
    const double leg_max = kLegMaxFrac * p_.leg_ref_length();
    if (n.leg_mean < kLegMin) {
      n.leg_mean = kLegMin;
      n.leg_mean_rate = std::max(0.0, n.leg_mean_rate);
    } else if (n.leg_mean > leg_max) {
      n.leg_mean = leg_max;
      n.leg_mean_rate = std::min(0.0, n.leg_mean_rate);
    }
  }

  // Roll: body-vs-contact-line deviation chi; gravity destabilizes about the
  // true vertical, the knee torque differential is the control lever.
  {
    const double H = robot_height(L, s.sagittal[1]);
    const double phi_c = contact_tilt(s.sagittal[2]);
    const double F_diff = std::abs(J) > 1e-6
                              ? std::clamp((cmd.tau_knee_r - cmd.tau_knee_l) / J, -kLegForceCap,
                                           kLegForceCap)
                              : 0.0;
    const double ctl = -F_diff * 0.5 * p_.track_width;
    auto f = [&](double q, double qd) {
      (void)qd;
      return (p_.total_mass() * p_.g * H * std::sin(q + phi_c) + ctl) / p_.I_roll;
    };
    const double q = s.chi, qd = s.chi_rate;
    const double k1 = f(q, qd);
    const double k2 = f(q + 0.5 * dt * qd, qd + 0.5 * dt * k1);
    const double k3 = f(q + 0.5 * dt * qd + 0.25 * dt * dt * k1, qd + 0.5 * dt * k2);
    const double k4 = f(q + dt * qd + 0.5 * dt * dt * k2, qd + dt * k3);
    n.chi = q + dt * qd + dt * dt / 6.0 * (k1 + k2 + k3);
    n.chi_rate = qd + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  n.time = s.time + dt;
  const double tilt_new = contact_tilt(n.sagittal[2]);
  const double tilt_old = contact_tilt(s.sagittal[2]);
  n.psi = n.chi + tilt_new;
  n.psi_rate = n.chi_rate + (tilt_new - tilt_old) / dt;

  // Per-side leg lengths implied by the roll deviation.
  {
    const double ct = std::max(0.2, std::cos(n.sagittal[1]));
    const double dL = n.chi * p_.track_width / ct;
    const double leg_max = kLegMaxFrac * p_.leg_ref_length();
    const double L_l = std::clamp(n.leg_mean + 0.5 * dL, kLegMin, leg_max);
    const double L_r = std::clamp(n.leg_mean - 0.5 * dL, kLegMin, leg_max);
    n.sigma2_left = sigma2_for_leg_length(L_l, p_);
    n.sigma2_right = sigma2_for_leg_length(L_r, p_);
  }

  auto finite = [](double v) { return std::isfinite(v); };
  const bool all_finite = n.sagittal.allFinite() && finite(n.yaw) && finite(n.yaw_rate) &&
                          finite(n.chi) && finite(n.chi_rate) && finite(n.leg_mean) &&
                          finite(n.split);
  if (!all_finite) {
    n.termination = Termination::diverged;
  } else if (std::abs(n.sagittal[1]) >= 0.5 * M_PI || std::abs(n.psi) >= 0.5 * M_PI) {
    n.termination = Termination::fallen;
  }
  return n;
}

namespace {

struct SideJoints {
  StateEstimator::RawJoints left;
  StateEstimator::RawJoints right;
};

SideJoints joints_from_plant(const FullPlantState& s, const RobotParams& p) {
  SideJoints j;
  const double gamma = s.sagittal[0];
  const double theta = s.sagittal[1];
  const double x = s.sagittal[2];
  const double th_l = theta - 0.5 * s.split;
  const double th_r = theta + 0.5 * s.split;
  j.left.sigma2 = s.sigma2_left;
  j.right.sigma2 = s.sigma2_right;
  j.left.sigma1 = th_l - gamma - 0.5 * j.left.sigma2;
  j.right.sigma1 = th_r - gamma - 0.5 * j.right.sigma2;
  const double x_l = x - 0.5 * p.track_width * s.yaw;
  const double x_r = x + 0.5 * p.track_width * s.yaw;
  j.left.sigma3 = x_l / p.R - (gamma + j.left.sigma1 + j.left.sigma2);
  j.right.sigma3 = x_r / p.R - (gamma + j.right.sigma1 + j.right.sigma2);
  return j;
}

ImuSample imu_from_plant(const FullPlantState& s, const PlantSim& plant, const RobotParams& p,
                         double t, const NoiseConfig& nc, std::mt19937_64* eng,
                         std::normal_distribution<double>& dist) {
  auto noise = [&](int ch, double sd) { return nc.enabled ? dist(eng[ch]) * sd : 0.0; };
  const double bias = nc.enabled ? nc.gyro_bias : 0.0;
  const double pitch_m = s.sagittal[0] + (nc.enabled ? nc.imu_pitch_bias : 0.0);

  const double theta = s.sagittal[1];
  const double td = s.sagittal[4];
  const double tdd = s.last_qdd[1];
  const double xdd = s.last_qdd[2];
  const double L = s.leg_mean;
  const double st = std::sin(theta), ct = std::cos(theta);
  // IMU sits at the hip midpoint.
  const double ax_loc = xdd + L * (ct * tdd - st * td * td);
  const double az_loc = -L * (st * tdd + ct * td * td);
  const double slope = plant.sagittal_slope(s.sagittal[2]);
  const double gx = -p.g * std::sin(slope), gz = -p.g * std::cos(slope);
  const double fx = ax_loc - gx;
  const double fz = az_loc - gz;

  const double cg = std::cos(pitch_m), sg = std::sin(pitch_m);
  const double f_bx = fx * cg - fz * sg;
  const double f_bz0 = fx * sg + fz * cg;
  const double cpsi = std::cos(s.psi), spsi = std::sin(s.psi);

  ImuSample imu;
  imu.timestamp = t;
  imu.gyro = {s.psi_rate + bias + noise(0, nc.gyro_std), s.sagittal[3] + bias + noise(1, nc.gyro_std),
              s.yaw_rate + bias + noise(2, nc.gyro_std)};
  imu.accel = {f_bx + noise(3, nc.accel_std), f_bz0 * spsi + noise(4, nc.accel_std),
               f_bz0 * cpsi + noise(5, nc.accel_std)};
  return imu;
}

}  // namespace

TrajectoryLog run_scenario(const Scenario& sc, const RobotParams& p, const ControllerGains& g,
                           const GainSchedule& schedule) {
  sc.validate();
  p.validate();
  g.validate();

  PlantSim plant(p, sc);
  FullPlantState s;
  s.leg_mean = sc.initial_leg;
  s.sigma2_left = s.sigma2_right = sigma2_for_leg_length(sc.initial_leg, p);

  StateEstimator est(p, FilterConfig{g.filter_alpha, g.filter_bias_gain, p.g});
  MotionController ctl(p, g, schedule);
  ctl.reset();

  std::mt19937_64 eng[6];
  for (int i = 0; i < 6; ++i) eng[i].seed(sc.seed * 1000003ULL + 7919ULL * i + 1ULL);
  std::normal_distribution<double> dist(0.0, 1.0);

  {
    const SideJoints j0 = joints_from_plant(s, p);
    est.reset(AttitudeEstimate{}, j0.left, j0.right);
  }

  const int n_sub = static_cast<int>(std::round(g.control_dt / g.physics_dt));
  const int n_ticks = static_cast<int>(std::round(sc.duration / g.control_dt));

  TrajectoryLog log;
  log.scenario = sc.name;
  log.rows.reserve(n_ticks + 1);
  size_t next_impulse = 0;

  for (int k = 0; k <= n_ticks; ++k) {
    const double t = k * g.control_dt;
    const ImuSample imu = imu_from_plant(s, plant, p, t, sc.noise, eng, dist);
    const SideJoints joints = joints_from_plant(s, p);
    const StateEstimator::Output eo = est.update(imu, joints.left, joints.right, g.control_dt);
    const ReferenceInput ref = sc.reference_at(t);
    const MotionController::Output co = ctl.tick(eo, ref, g.control_dt);

    LogRow row{};
    row.time = t;
    row.gamma = s.sagittal[0];
    row.theta = s.sagittal[1];
    row.x = s.sagittal[2];
    row.gamma_dot = s.sagittal[3];
    row.theta_dot = s.sagittal[4];
    row.x_dot = s.sagittal[5];
    row.yaw = s.yaw;
    row.yaw_rate = s.yaw_rate;
    row.psi = s.psi;
    row.psi_rate = s.psi_rate;
    row.split = s.split;
    row.leg_mean = s.leg_mean;
    row.sigma2_left = s.sigma2_left;
    row.sigma2_right = s.sigma2_right;
    row.gamma_hat = eo.state.gamma;
    row.theta_hat = eo.state.theta;
    row.x_hat = eo.state.x;
    row.x_dot_hat = eo.state.x_dot;
    row.psi_hat = eo.att.psi_hat;
    row.yaw_hat = eo.yaw_hat;
    row.gamma_d = ref.gamma_d;
    row.x_d = co.x_d;
    row.v_d = ref.v_d;
    row.psi_d = ref.psi_d;
    row.yaw_d = co.yaw_d;
    row.leg_d = ref.L_leg_d;
    row.split_d = ref.split_d;
    row.tau_hip_l = co.mix.cmd.tau_hip_l;
    row.tau_hip_r = co.mix.cmd.tau_hip_r;
    row.tau_knee_l = co.mix.cmd.tau_knee_l;
    row.tau_knee_r = co.mix.cmd.tau_knee_r;
    row.tau_wheel_l = co.mix.cmd.tau_wheel_l;
    row.tau_wheel_r = co.mix.cmd.tau_wheel_r;
    row.sat_flags = 0;
    for (int b = 0; b < 6; ++b)
      if (co.mix.saturated[b]) row.sat_flags |= 1 << b;
    if (co.gain_clamped) row.sat_flags |= 1 << 6;
    if (co.degenerate_leg) row.sat_flags |= 1 << 7;
    row.F_f = s.last_forces.F_f;
    row.F_N = s.last_forces.F_N;
    row.F_drive = (co.mix.cmd.tau_wheel_l + co.mix.cmd.tau_wheel_r) / p.R;
    log.rows.push_back(row);

    if (k == n_ticks || s.termination != Termination::running) break;

    for (int m = 0; m < n_sub; ++m) {
      const double t_sub = t + (m + 1) * g.physics_dt;
      while (next_impulse < sc.impulses.size() && sc.impulses[next_impulse].time <= t_sub) {
        const double m_eff = p.wheel_mass_total() + p.wheel_inertia_total() / (p.R * p.R) +
                             p.rod_mass() + p.m_H;
        s.sagittal[5] += sc.impulses[next_impulse].momentum / m_eff;
        ++next_impulse;
      }
      s = plant.step(s, co.mix.cmd, g.physics_dt);
      if (s.termination != Termination::running) break;
    }
  }

  log.termination = s.termination;
  log.end_time = log.rows.empty() ? 0.0 : log.rows.back().time;
  log.metrics = compute_metrics(log.rows);
  return log;
}

RunMetrics compute_metrics(const std::vector<LogRow>& rows) {
  RunMetrics m;
  if (rows.empty()) return m;
  double psi_min = rows.front().psi, psi_max = rows.front().psi;
  double sum_sq_vel = 0.0;
  double last_unsettled = -1.0;
  for (const auto& r : rows) {
    const double pitch_err = r.gamma - r.gamma_d;
    m.max_abs_pitch_error = std::max(m.max_abs_pitch_error, std::abs(pitch_err));
    m.max_abs_theta = std::max(m.max_abs_theta, std::abs(r.theta));
    m.max_abs_split_achieved = std::max(m.max_abs_split_achieved, std::abs(r.split));
    psi_min = std::min(psi_min, r.psi);
    psi_max = std::max(psi_max, r.psi);
    const double ve = r.x_dot - r.v_d;
    sum_sq_vel += ve * ve;
    if (std::abs(pitch_err) > 0.05) last_unsettled = r.time;
  }
  m.roll_variation = psi_max - psi_min;
  m.rms_velocity_error = std::sqrt(sum_sq_vel / rows.size());
  if (last_unsettled < 0.0) {
    m.settling_time = 0.0;
  } else if (last_unsettled >= rows.back().time) {
    m.settling_time = rows.back().time;
  } else {
    m.settling_time = last_unsettled;
  }
  return m;
}

namespace {

const char* kCsvHeader =
    "time_s,gamma_rad,theta_rad,x_m,gamma_dot_rad_s,theta_dot_rad_s,x_dot_m_s,"
    "yaw_rad,yaw_rate_rad_s,psi_rad,psi_rate_rad_s,split_rad,leg_mean_m,"
    "sigma2_left_rad,sigma2_right_rad,"
    "gamma_hat_rad,theta_hat_rad,x_hat_m,x_dot_hat_m_s,psi_hat_rad,yaw_hat_rad,"
    "gamma_d_rad,x_d_m,v_d_m_s,psi_d_rad,yaw_d_rad,leg_d_m,split_d_rad,"
    "tau_hip_l_Nm,tau_hip_r_Nm,tau_knee_l_Nm,tau_knee_r_Nm,tau_wheel_l_Nm,tau_wheel_r_Nm,"
    "sat_flags,F_f_N,F_N_N,F_drive_N";

void append_summary(std::string& out, const TrajectoryLog& log, const char* prefix) {
  char buf[160];
  auto add = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s%s = %.17g\n", prefix, k, v);
    out += buf;
  };
  out += prefix;
  out += "scenario = " + log.scenario + "\n";
  const char* term = log.termination == Termination::running
                         ? "completed"
                         : (log.termination == Termination::fallen ? "fallen" : "diverged");
  out += prefix;
  out += std::string("termination = ") + term + "\n";
  add("end_time_s", log.end_time);
  add("max_abs_pitch_error_rad", log.metrics.max_abs_pitch_error);
  add("max_abs_theta_rad", log.metrics.max_abs_theta);
  add("roll_variation_rad", log.metrics.roll_variation);
  add("settling_time_s", log.metrics.settling_time);
  add("rms_velocity_error_m_s", log.metrics.rms_velocity_error);
  add("max_abs_split_rad", log.metrics.max_abs_split_achieved);
}

}  // namespace

std::string csv_string(const TrajectoryLog& log, SummaryMode mode) {
  std::string out = kCsvHeader;
  out += '\n';
  char buf[1600];
  for (const auto& r : log.rows) {
    const double v[] = {r.time,       r.gamma,      r.theta,      r.x,          r.gamma_dot,
                        r.theta_dot,  r.x_dot,      r.yaw,        r.yaw_rate,   r.psi,
                        r.psi_rate,   r.split,      r.leg_mean,   r.sigma2_left, r.sigma2_right,
                        r.gamma_hat,  r.theta_hat,  r.x_hat,      r.x_dot_hat,  r.psi_hat,
                        r.yaw_hat,    r.gamma_d,    r.x_d,        r.v_d,        r.psi_d,
                        r.yaw_d,      r.leg_d,      r.split_d,    r.tau_hip_l,  r.tau_hip_r,
                        r.tau_knee_l, r.tau_knee_r, r.tau_wheel_l, r.tau_wheel_r};
    int n = 0;
    for (size_t i = 0; i < sizeof(v) / sizeof(v[0]); ++i)
      n += std::snprintf(buf + n, sizeof buf - n, i == 0 ? "%.17g" : ",%.17g", v[i]);
    n += std::snprintf(buf + n, sizeof buf - n, ",%d,%.17g,%.17g,%.17g", r.sat_flags, r.F_f, r.F_N,
                       r.F_drive);
    out += buf;
    out += '\n';
  }
  if (mode == SummaryMode::trailing_comments) append_summary(out, log, "# ");
  return out;
}

void write_csv(const std::string& path, const TrajectoryLog& log, SummaryMode mode) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << csv_string(log, mode);
  }
  std::filesystem::rename(tmp, path);
  if (mode == SummaryMode::sidecar) {
    std::string side;
    append_summary(side, log, "");
    const std::string spath = path + ".summary.txt";
    const std::string stmp = spath + ".tmp";
    {
      std::ofstream f(stmp, std::ios::trunc);
      if (!f) throw std::runtime_error("cannot write '" + stmp + "'");
      f << side;
    }
    std::filesystem::rename(stmp, spath);
  }
}

namespace {

RefSegment seg(double t0, double t1, const ReferenceInput& a, const ReferenceInput& b) {
  RefSegment s;
  s.t0 = t0;
  s.t1 = t1;
  s.start = a;
  s.end = b;
  return s;
}

ReferenceInput ref_v(double v, double L = 0.25) {
  ReferenceInput r;
  r.v_d = v;
  r.L_leg_d = L;
  return r;
}

}  // namespace

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;

  {
    // Straight-line velocity tracking on flat ground.
    Scenario sc;
    sc.name = "flat_tracking";
    sc.duration = 10.0;
    sc.segments = {
        seg(0.0, 0.1, ref_v(0), ref_v(0)),
        seg(0.1, 1.5, ref_v(0), ref_v(2.0)),
        seg(1.5, 3.5, ref_v(2.0), ref_v(2.0)),
        seg(3.5, 4.9, ref_v(2.0), ref_v(0)),
        seg(4.9, 10.0, ref_v(0), ref_v(0)),
    };
    out.push_back(sc);
  }

  {
    // Hold the head pitched 1 rad forward while cruising; sensor noise and
    // an IMU mounting bias stay on, gains come from the relinearized model.
    Scenario sc;
    sc.name = "pitch_hold";
    sc.duration = 12.0;
    ReferenceInput idle = ref_v(0);
    ReferenceInput cruise = ref_v(2.0);
    ReferenceInput hold = cruise;
    hold.gamma_d = 1.0;
    ReferenceInput ramp_v = idle;
    ReferenceInput ramp_g0 = cruise;
    sc.segments = {
        seg(0.0, 0.5, idle, idle),
        seg(0.5, 2.5, ramp_v, cruise),
        seg(2.5, 3.0, cruise, cruise),
        seg(3.0, 5.0, ramp_g0, hold),
        seg(5.0, 12.0, hold, hold),
    };
    sc.noise.enabled = true;
    sc.noise.imu_pitch_bias = 0.02;
    sc.relinearize_pitch = 1.0;
    out.push_back(sc);
  }

  {
    // Single-side ramp: one wheel climbs a 0.523 rad slope while the roll
    // and height controllers keep the body level.
    Scenario sc;
    sc.name = "slope_roll";
    sc.duration = 10.0;
    sc.segments = {
        seg(0.0, 0.1, ref_v(0), ref_v(0)),
        seg(0.1, 0.6, ref_v(0), ref_v(0.4)),
        seg(0.6, 9.0, ref_v(0.4), ref_v(0.4)),
        seg(9.0, 10.0, ref_v(0.4), ref_v(0)),
    };
    const double rise = 0.12;
    const double run = rise / std::tan(0.523);
    sc.side_height.knots = {{0.8, 0.0}, {0.8 + run, rise}, {2.0, rise}, {2.0 + run, 0.0}};
    out.push_back(sc);
  }

  {
    // Spacewalk gait: sinusoidal split-angle reference while cruising.
    Scenario sc;
    sc.name = "spacewalk";
    sc.duration = 10.0;
    sc.segments = {
        seg(0.0, 0.1, ref_v(0), ref_v(0)),
        seg(0.1, 1.5, ref_v(0), ref_v(2.0)),
        seg(1.5, 2.5, ref_v(2.0), ref_v(2.0)),
        seg(2.5, 9.0, ref_v(2.0), ref_v(2.0)),
        seg(9.0, 10.0, ref_v(2.0), ref_v(2.0)),
    };
    sc.segments[3].split_sine = true;
    sc.segments[3].split_amp = 0.5;
    sc.segments[3].split_freq = 0.5;
    out.push_back(sc);
  }

  {
    // Station keeping against a forward shove.
    Scenario sc;
    sc.name = "step_disturbance";
    sc.duration = 8.0;
    sc.segments = {seg(0.0, 8.0, ref_v(0), ref_v(0))};
    sc.impulses = {{2.0, 5.0}};
    out.push_back(sc);
  }

  return out;
}

std::optional<Scenario> find_scenario(const std::string& name) {
  for (auto& sc : builtin_scenarios())
    if (sc.name == name) return sc;
  return std::nullopt;
}

}  // namespace wbr
