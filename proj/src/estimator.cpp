#include "wbr/estimator.hpp"

#include <cmath>

namespace wbr {

namespace {

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

// One axis of the blend. pred uses the bias-corrected gyro; the accel
// residual also feeds the first-order bias observer.
void fuse_axis(double gyro, double angle_acc, bool use_accel, double dt, const FilterConfig& cfg,
               double& angle, double& rate, double& bias) {
  const double rate_corr = gyro - bias;
  const double pred = angle + rate_corr * dt;
  if (use_accel && cfg.alpha < 1.0) {
    const double err = angle_acc - pred;
    angle = pred + (1.0 - cfg.alpha) * err;
    bias -= cfg.bias_gain * (1.0 - cfg.alpha) * err;
  } else {
    angle = pred;
  }
  angle = wrap_angle(angle);
  rate = gyro - bias;
}

}  // namespace

AttitudeEstimate complementary_update(const AttitudeEstimate& prev, const ImuSample& imu,
                                      double dt, const FilterConfig& cfg, bool* accel_gated) {
  AttitudeEstimate out = prev;
  const double anorm =
      std::sqrt(imu.accel[0] * imu.accel[0] + imu.accel[1] * imu.accel[1] + imu.accel[2] * imu.accel[2]);
  const bool accel_ok = anorm >= 0.5 * cfg.g && anorm <= 1.5 * cfg.g;
  if (accel_gated) *accel_gated = !accel_ok;

  // Tilt from the gravity direction: pitch from (x, z), roll from (y, z).
  const double pitch_acc = accel_ok ? std::atan2(-imu.accel[0], imu.accel[2]) : 0.0;
  const double roll_acc = accel_ok ? std::atan2(imu.accel[1], imu.accel[2]) : 0.0;

  fuse_axis(imu.gyro[1], pitch_acc, accel_ok, dt, cfg, out.gamma_hat, out.gamma_rate, out.bias_pitch);
  fuse_axis(imu.gyro[0], roll_acc, accel_ok, dt, cfg, out.psi_hat, out.psi_rate, out.bias_roll);
  return out;
}

double quantize_angle(double angle, int encoder_counts) {
  const double lsb = 2.0 * M_PI / encoder_counts;
  return std::round(angle / lsb) * lsb;
}

ControlState assemble_state(const AttitudeEstimate& att, const JointState& left,
                            const JointState& right, const ControlState& prev, double dt,
                            const RobotParams& p) {
  const int N = p.encoder_counts;
  auto theta_of = [&](const JointState& j) {
    return att.gamma_hat + quantize_angle(j.sigma1, N) + 0.5 * quantize_angle(j.sigma2, N);
  };
  auto x_of = [&](const JointState& j) {
    return p.R * (att.gamma_hat + quantize_angle(j.sigma1 + j.sigma2 + j.sigma3, N));
  };
  auto theta_rate_of = [&](const JointState& j) {
    return att.gamma_rate + j.sigma1_dot + 0.5 * j.sigma2_dot;
  };
  auto x_rate_of = [&](const JointState& j) {
    return p.R * (att.gamma_rate + j.sigma1_dot + j.sigma2_dot + j.sigma3_dot);
  };

  ControlState s;
  s.gamma = att.gamma_hat;
  s.theta = 0.5 * (theta_of(left) + theta_of(right));
  s.x = 0.5 * (x_of(left) + x_of(right));
  s.gamma_dot = att.gamma_rate;
  s.theta_dot = 0.5 * (theta_rate_of(left) + theta_rate_of(right));
  s.x_dot = 0.5 * (x_rate_of(left) + x_rate_of(right));
  s.int_gamma = prev.int_gamma + 0.5 * (prev.gamma + s.gamma) * dt;
  s.int_x = prev.int_x + 0.5 * (prev.x + s.x) * dt;
  return s;
}

void StateEstimator::reset(const AttitudeEstimate& initial, const RawJoints& left,
                           const RawJoints& right) {
  att_ = initial;
  prev_state_ = ControlState{};
  yaw_hat_ = 0.0;
  const RawJoints* sides[2] = {&left, &right};
  for (int s = 0; s < 2; ++s) {
    prev_sigma_q_[s] = {quantize_angle(sides[s]->sigma1, p_.encoder_counts),
                        quantize_angle(sides[s]->sigma2, p_.encoder_counts),
                        quantize_angle(sides[s]->sigma3, p_.encoder_counts)};
    rate_lp_[s] = {0.0, 0.0, 0.0};
  }
  xdot_hist_.fill(0.0);
  hist_head_ = 0;
  leg_prev_ = 0.0;
  leg_rate_lp_ = 0.0;
  primed_ = false;
}

StateEstimator::Output StateEstimator::update(const ImuSample& imu, const RawJoints& left,
                                              const RawJoints& right, double dt) {
  Output out;
  const int N = p_.encoder_counts;
  constexpr double kRateCutoffHz = 50.0;
  const double lp_w = dt / (dt + 1.0 / (2.0 * M_PI * kRateCutoffHz));

  const RawJoints* sides[2] = {&left, &right};
  JointState js[2];
  for (int s = 0; s < 2; ++s) {
    const std::array<double, 3> q = {quantize_angle(sides[s]->sigma1, N),
                                     quantize_angle(sides[s]->sigma2, N),
                                     quantize_angle(sides[s]->sigma3, N)};
    for (int j = 0; j < 3; ++j) {
      const double raw_rate = primed_ ? (q[j] - prev_sigma_q_[s][j]) / dt : 0.0;
      rate_lp_[s][j] += lp_w * (raw_rate - rate_lp_[s][j]);
      prev_sigma_q_[s][j] = q[j];
    }
    js[s].sigma1 = sides[s]->sigma1;
    js[s].sigma2 = sides[s]->sigma2;
    js[s].sigma3 = sides[s]->sigma3;
    js[s].sigma1_dot = rate_lp_[s][0];
    js[s].sigma2_dot = rate_lp_[s][1];
    js[s].sigma3_dot = rate_lp_[s][2];
    js[s].side = s == 0 ? Side::left : Side::right;
  }

  // The accelerometer is only a valid tilt reference when the base is
  // quasi-static: sustained longitudinal acceleration reads as pitch. The
  // odometry acceleration (windowed differences, clean of encoder
  // quantization) plus the gyro rates decide whether the sample is quiet;
  // everything else coasts on the gyro, and the residual odometry
  // acceleration is subtracted from the quiet samples.
  const double sum_rate =
      0.5 * ((rate_lp_[0][0] + rate_lp_[0][1] + rate_lp_[0][2]) +
             (rate_lp_[1][0] + rate_lp_[1][1] + rate_lp_[1][2]));
  const double xdot_odom = p_.R * (att_.gamma_rate + sum_rate);
  xdot_hist_[hist_head_ % kSlowWin] = xdot_odom;
  const auto hist_at = [&](int back) {
    const int idx = hist_head_ - back;
    return idx >= 0 ? xdot_hist_[idx % kSlowWin] : 0.0;
  };
  const int n_fast = std::min(hist_head_, static_cast<int>(std::round(0.1 / dt)));
  const int n_slow = std::min(hist_head_, kSlowWin - 1);
  const double a_fast = n_fast > 0 ? (xdot_odom - hist_at(n_fast)) / (n_fast * dt) : 0.0;
  const double a_slow = n_slow > 0 ? (xdot_odom - hist_at(n_slow)) / (n_slow * dt) : 0.0;
  ++hist_head_;
  const bool quiet = std::abs(a_fast) <= 0.25 && std::abs(a_slow) <= 0.15 &&
                     std::abs(imu.gyro[0]) <= 0.25 && std::abs(imu.gyro[1]) <= 0.25;

  ImuSample compensated = imu;
  if (!quiet) {
    compensated.accel = {0.0, 0.0, 0.0};  // fails the plausibility gate: gyro-only step
  } else {
    const double cg = std::cos(att_.gamma_hat);
    const double sg = std::sin(att_.gamma_hat);
    compensated.accel[0] -= a_slow * cg;
    compensated.accel[2] -= a_slow * sg;
  }

  att_ = complementary_update(att_, compensated, dt, cfg_, &out.accel_gated);
  js[0].gamma = att_.gamma_hat;
  js[1].gamma = att_.gamma_hat;
  js[0].gamma_dot = att_.gamma_rate;
  js[1].gamma_dot = att_.gamma_rate;

  prev_state_ = assemble_state(att_, js[0], js[1], prev_state_, primed_ ? dt : 0.0, p_);
  yaw_hat_ += imu.gyro[2] * dt;

  out.att = att_;
  out.state = prev_state_;
  auto theta_side = [&](const JointState& j) {
    return att_.gamma_hat + quantize_angle(j.sigma1, N) + 0.5 * quantize_angle(j.sigma2, N);
  };
  out.theta_left = theta_side(js[0]);
  out.theta_right = theta_side(js[1]);
  out.theta_split_rate = (js[1].sigma1_dot + 0.5 * js[1].sigma2_dot) -
                         (js[0].sigma1_dot + 0.5 * js[0].sigma2_dot);
  out.yaw_hat = yaw_hat_;
  out.yaw_rate_hat = imu.gyro[2];

  const double leg_l = leg_length(quantize_angle(left.sigma2, N), p_);
  const double leg_r = leg_length(quantize_angle(right.sigma2, N), p_);
  out.leg_length = 0.5 * (leg_l + leg_r);
  const double leg_rate_raw = primed_ ? (out.leg_length - leg_prev_) / dt : 0.0;
  leg_rate_lp_ += lp_w * (leg_rate_raw - leg_rate_lp_);
  leg_prev_ = out.leg_length;
  out.leg_length_rate = leg_rate_lp_;

  primed_ = true;
  return out;
}

}  // namespace wbr
