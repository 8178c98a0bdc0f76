#pragma once

#include <array>

#include "wbr/kinematics.hpp"
#include "wbr/params.hpp"

namespace wbr {

/// One IMU reading: body-frame angular rates and specific force.
/// Axes: x forward, y left, z up; pitch rate on y, roll rate on x, yaw on z.
struct ImuSample {
  std::array<double, 3> gyro = {0.0, 0.0, 0.0};   ///< rad/s (roll, pitch, yaw rates)
  std::array<double, 3> accel = {0.0, 0.0, 9.81}; ///< m/s^2 specific force
  double timestamp = 0.0;                          ///< s, strictly increasing
};

/// Fused attitude plus the first-order gyro bias states the filter carries.
struct AttitudeEstimate {
  double gamma_hat = 0.0;  ///< pitch (rad), in (-pi, pi]
  double psi_hat = 0.0;    ///< roll (rad), in (-pi, pi]
  double gamma_rate = 0.0; ///< bias-corrected pitch rate (rad/s)
  double psi_rate = 0.0;   ///< bias-corrected roll rate (rad/s)
  double bias_pitch = 0.0; ///< estimated pitch-gyro bias (rad/s)
  double bias_roll = 0.0;  ///< estimated roll-gyro bias (rad/s)
};

struct FilterConfig {
  double alpha = 0.98;     ///< gyro weight per step, in [0, 1]
  double bias_gain = 0.05; ///< first-order bias observer gain
  double g = 9.81;         ///< used by the accel plausibility gate
};

/// One complementary-filter step per axis:
///   angle <- alpha*(prev + gyro*dt) + (1 - alpha)*angle_from_accel.
/// Samples whose accel magnitude falls outside [0.5 g, 1.5 g] take a
/// gyro-only step; *accel_gated reports that when provided.
AttitudeEstimate complementary_update(const AttitudeEstimate& prev, const ImuSample& imu,
                                      double dt, const FilterConfig& cfg,
                                      bool* accel_gated = nullptr);

/// Assembles the full control state from the fused attitude and both legs'
/// joint readings. Encoder angles are quantized to 2*pi/encoder_counts
/// before use (the odometry path quantizes the summed joint angle once);
/// integral states accumulate by the trapezoidal rule from `prev`.
ControlState assemble_state(const AttitudeEstimate& att, const JointState& left,
                            const JointState& right, const ControlState& prev, double dt,
                            const RobotParams& p);

/// Round to the encoder grid.
double quantize_angle(double angle, int encoder_counts);

/**
 * Full estimator pipeline run at the control rate: encoder quantization and
 * rate differencing (50 Hz low-pass), odometry-aided leveling of the
 * accelerometer (the wheel-odometry acceleration estimate is subtracted from
 * the specific force before the tilt extraction, so sustained longitudinal
 * acceleration does not masquerade as pitch), complementary attitude fusion
 * and control-state assembly.
 */
class StateEstimator {
public:
  StateEstimator(const RobotParams& p, const FilterConfig& cfg) : p_(p), cfg_(cfg) {}

  struct RawJoints {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma3 = 0.0;
  };

  struct Output {
    AttitudeEstimate att;
    ControlState state;
    double theta_left = 0.0;   ///< per-side pendulum angles for the split controller
    double theta_right = 0.0;
    double theta_split_rate = 0.0;
    double yaw_hat = 0.0;      ///< integrated yaw-gyro heading
    double yaw_rate_hat = 0.0;
    double leg_length = 0.0;   ///< mean leg length from the knee encoders
    double leg_length_rate = 0.0;
    bool accel_gated = false;
  };

  /// Starts a scenario: zeroes integrals, rates and filter memory. The
  /// initial attitude is taken as given (power-on calibration).
  void reset(const AttitudeEstimate& initial, const RawJoints& left, const RawJoints& right);

  Output update(const ImuSample& imu, const RawJoints& left, const RawJoints& right, double dt);

private:
  RobotParams p_;
  FilterConfig cfg_;
  AttitudeEstimate att_;
  ControlState prev_state_;
  double yaw_hat_ = 0.0;
  std::array<std::array<double, 3>, 2> prev_sigma_q_{};  // [side][joint]
  std::array<std::array<double, 3>, 2> rate_lp_{};
  static constexpr int kSlowWin = 151;  // 0.3 s of odometry history at 500 Hz
  std::array<double, kSlowWin> xdot_hist_{};
  int hist_head_ = 0;
  double leg_prev_ = 0.0;
  double leg_rate_lp_ = 0.0;
  bool primed_ = false;
};

}  // namespace wbr
