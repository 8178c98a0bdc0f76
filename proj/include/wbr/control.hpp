#pragma once

#include <array>

#include "wbr/estimator.hpp"
#include "wbr/lqr.hpp"

namespace wbr {

/// Reference channels consumed by one controller tick. Velocity and yaw-rate
/// commands integrate into x_d and yaw_d inside the controller.
struct ReferenceInput {
  double gamma_d = 0.0;      ///< head pitch reference (rad)
  double v_d = 0.0;          ///< forward velocity command (m/s)
  double yaw_rate_d = 0.0;   ///< yaw rate command (rad/s)
  double psi_d = 0.0;        ///< roll reference (rad)
  double psi_d_dot = 0.0;
  double L_leg_d = 0.25;     ///< leg length reference (m)
  double L_leg_d_dot = 0.0;
  double L_leg_d_ddot = 0.0;
  double split_d = 0.0;      ///< leg-angle difference reference (rad)
  double split_d_dot = 0.0;
};

/// Six torque outputs, each within [-tau_max, tau_max] after mixing.
struct MotorCommands {
  double tau_hip_l = 0.0;
  double tau_hip_r = 0.0;
  double tau_knee_l = 0.0;
  double tau_knee_r = 0.0;
  double tau_wheel_l = 0.0;
  double tau_wheel_r = 0.0;
};

struct MixResult {
  MotorCommands cmd;
  // order: hip_l, hip_r, knee_l, knee_r, wheel_l, wheel_r
  std::array<bool, 6> saturated = {false, false, false, false, false, false};
  bool any_wheel_saturated() const { return saturated[4] || saturated[5]; }
};

Vec8 to_vec8(const ControlState& s);

/// u = K*(X_d - X); pure linear law, saturation happens in the mixer.
struct BalanceTorques {
  double tau_H;
  double tau_w;
};
BalanceTorques balance_control(const GainMat& K, const ControlState& X_d, const ControlState& X);

/// Knee torque from the leg-length PD with gravity feedforward:
///   dF = Lddot_d + kp*(L_d - L) + kd*(Ldot_d - Ldot),  tau = J*(dF + m_H*g)
/// with J the leg Jacobian at the current knee angle. J = 0 at full
/// extension, which the `degenerate` flag reports.
struct HeightTorque {
  double tau_knee;
  bool degenerate;
};
HeightTorque height_control(const ReferenceInput& ref, double L_leg, double L_leg_dot,
                            const RobotParams& p, const ControllerGains& g);

double roll_control(double psi_d, double psi_dot_d, double psi_hat, double psi_dot_hat,
                    const ControllerGains& g);

double yaw_control(const Eigen::RowVector2d& K_yaw, double yaw_err, double yaw_rate_err);

/// LQR gain for the rigid-body yaw plant I_yaw*yaw_dd = (track/R)*dtau_w,
/// discretized at the control period.
Eigen::RowVector2d synthesize_yaw_gain(const RobotParams& p, const ControllerGains& g);

double split_angle_control(double split_d, double split_d_dot, double delta_theta,
                           double delta_theta_dot, const ControllerGains& g);

/// Superposition of all controller outputs onto six motors, then clamping:
///   hip   = tau_H/2 +- d_split    (left +)
///   knee  = tau_knee +- d_roll    (right +)
///   wheel = tau_w/2 +- d_yaw      (right +)
MixResult mix_and_saturate(double tau_H, double tau_w, double tau_knee, double d_roll,
                           double d_yaw, double d_split, double tau_max);

/**
 * One balance + comprehensive-motion tick: builds the reference state of the
 * tracking law (integral slots of X carry the accumulated tracking errors,
 * the reference slots stay zero), runs the five controllers and mixes.
 * Integrators hold while a wheel channel is saturated.
 */
class MotionController {
public:
  MotionController(const RobotParams& p, const ControllerGains& g, const GainSchedule& schedule);

  struct Output {
    MixResult mix;
    double tau_H = 0.0;
    double tau_w = 0.0;
    double tau_knee = 0.0;
    double d_roll = 0.0;
    double d_yaw = 0.0;
    double d_split = 0.0;
    double x_d = 0.0;
    double yaw_d = 0.0;
    bool degenerate_leg = false;
    bool gain_clamped = false;
  };

  void reset();
  Output tick(const StateEstimator::Output& est, const ReferenceInput& ref, double dt);

  const GainSchedule& schedule() const { return schedule_; }

private:
  RobotParams p_;
  ControllerGains g_;
  GainSchedule schedule_;
  Eigen::RowVector2d K_yaw_;
  double x_d_ = 0.0;
  double yaw_d_ = 0.0;
  double int_err_gamma_ = 0.0;
  double int_err_x_ = 0.0;
  double prev_err_gamma_ = 0.0;
  double prev_err_x_ = 0.0;
  bool hold_integrators_ = false;
  bool primed_ = false;
};

}  // namespace wbr
