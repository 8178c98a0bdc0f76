#include "wbr/control.hpp"

#include <algorithm>
#include <cmath>

namespace wbr {

Vec8 to_vec8(const ControlState& s) {
  Vec8 v;
  v << s.gamma, s.theta, s.x, s.gamma_dot, s.theta_dot, s.x_dot, s.int_gamma, s.int_x;
  return v;
}

BalanceTorques balance_control(const GainMat& K, const ControlState& X_d, const ControlState& X) {
  const Eigen::Vector2d u = K * (to_vec8(X_d) - to_vec8(X));
  return {u[0], u[1]};
}

HeightTorque height_control(const ReferenceInput& ref, double L_leg, double L_leg_dot,
                            const RobotParams& p, const ControllerGains& g) {
  const double sigma2 = sigma2_for_leg_length(L_leg, p);
  const double J = leg_jacobian(sigma2, p);
  const double dF = ref.L_leg_d_ddot + g.kp_height * (ref.L_leg_d - L_leg) +
                    g.kd_height * (ref.L_leg_d_dot - L_leg_dot);
  HeightTorque out;
  out.tau_knee = J * (dF + p.m_H * p.g);
  out.degenerate = std::abs(J) < 1e-9;
  return out;
}

double roll_control(double psi_d, double psi_dot_d, double psi_hat, double psi_dot_hat,
                    const ControllerGains& g) {
  return g.kp_roll * (psi_d - psi_hat) + g.kd_roll * (psi_dot_d - psi_dot_hat);
}

double yaw_control(const Eigen::RowVector2d& K_yaw, double yaw_err, double yaw_rate_err) {
  return K_yaw[0] * yaw_err + K_yaw[1] * yaw_rate_err;
}

Eigen::RowVector2d synthesize_yaw_gain(const RobotParams& p, const ControllerGains& g) {
  Eigen::Matrix2d A;
  A << 0, 1, 0, 0;
  Eigen::Vector2d B;
  B << 0, p.track_width / (p.R * p.I_yaw);
  const DiscreteModel d = discretize(A, B, g.control_dt);
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  Q(0, 0) = g.Q_yaw_diag[0];
  Q(1, 1) = g.Q_yaw_diag[1];
  Eigen::MatrixXd R(1, 1);
  R << g.R_yaw;
  const Eigen::MatrixXd P = solve_dare(d.A, d.B, Q, R);
  return lqr_gain(d.A, d.B, R, P);
}

double split_angle_control(double split_d, double split_d_dot, double delta_theta,
                           double delta_theta_dot, const ControllerGains& g) {
  return g.kp_split * (split_d - delta_theta) + g.kd_split * (split_d_dot - delta_theta_dot);
}

MixResult mix_and_saturate(double tau_H, double tau_w, double tau_knee, double d_roll,
                           double d_yaw, double d_split, double tau_max) {
  MixResult r;
  const double raw[6] = {0.5 * tau_H + d_split,  0.5 * tau_H - d_split,
                         tau_knee - d_roll,      tau_knee + d_roll,
                         0.5 * tau_w - d_yaw,    0.5 * tau_w + d_yaw};
  double* out[6] = {&r.cmd.tau_hip_l,   &r.cmd.tau_hip_r,  &r.cmd.tau_knee_l,
                    &r.cmd.tau_knee_r,  &r.cmd.tau_wheel_l, &r.cmd.tau_wheel_r};
  for (int i = 0; i < 6; ++i) {
    const double clamped = std::clamp(raw[i], -tau_max, tau_max);
    r.saturated[i] = clamped != raw[i];
    *out[i] = clamped;
  }
  return r;
}

MotionController::MotionController(const RobotParams& p, const ControllerGains& g,
                                   const GainSchedule& schedule)
    : p_(p), g_(g), schedule_(schedule), K_yaw_(synthesize_yaw_gain(p, g)) {}

void MotionController::reset() {
  x_d_ = 0.0;
  yaw_d_ = 0.0;
  int_err_gamma_ = 0.0;
  int_err_x_ = 0.0;
  prev_err_gamma_ = 0.0;
  prev_err_x_ = 0.0;
  hold_integrators_ = false;
  primed_ = false;
}

MotionController::Output MotionController::tick(const StateEstimator::Output& est,
                                                const ReferenceInput& ref, double dt) {
  Output out;

  x_d_ += ref.v_d * dt;
  yaw_d_ += ref.yaw_rate_d * dt;
  out.x_d = x_d_;
  out.yaw_d = yaw_d_;

  // Tracking-error integrals (trapezoidal); they occupy the integral slots
  // of X so the reference slots stay zero. Held while a wheel saturates.
  const double err_gamma = est.state.gamma - ref.gamma_d;
  const double err_x = est.state.x - x_d_;
  if (primed_ && !hold_integrators_) {
    int_err_gamma_ += 0.5 * (prev_err_gamma_ + err_gamma) * dt;
    int_err_x_ += 0.5 * (prev_err_x_ + err_x) * dt;
  }
  prev_err_gamma_ = err_gamma;
  prev_err_x_ = err_x;
  primed_ = true;

  ControlState X = est.state;
  X.int_gamma = int_err_gamma_;
  X.int_x = int_err_x_;
  ControlState X_d;
  X_d.gamma = ref.gamma_d;
  X_d.x = x_d_;
  X_d.x_dot = ref.v_d;

  const GainMat K = lookup_gain(schedule_, est.leg_length, &out.gain_clamped);
  const BalanceTorques bal = balance_control(K, X_d, X);
  // Static hip torque holding the commanded pitch against gravity.
  const double d0 = 0.5 * M_PI - p_.beta0;
  const double tau_H_trim = -p_.m_H * p_.g * p_.l * std::sin(ref.gamma_d + d0);
  out.tau_H = bal.tau_H + tau_H_trim;
  out.tau_w = bal.tau_w;

  const HeightTorque h = height_control(ref, est.leg_length, est.leg_length_rate, p_, g_);
  out.tau_knee = h.tau_knee;
  out.degenerate_leg = h.degenerate;

  out.d_roll = roll_control(ref.psi_d, ref.psi_d_dot, est.att.psi_hat, est.att.psi_rate, g_);
  out.d_yaw = yaw_control(K_yaw_, yaw_d_ - est.yaw_hat, ref.yaw_rate_d - est.yaw_rate_hat);
  const double delta_theta = est.theta_right - est.theta_left;
  out.d_split = split_angle_control(ref.split_d, ref.split_d_dot, delta_theta,
                                    est.theta_split_rate, g_);

  out.mix = mix_and_saturate(out.tau_H, out.tau_w, out.tau_knee, out.d_roll, out.d_yaw,
                             out.d_split, p_.tau_max);
  hold_integrators_ = out.mix.any_wheel_saturated();
  return out;
}

}  // namespace wbr
