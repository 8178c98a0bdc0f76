#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wbr/control.hpp"
#include "wbr/dynamics.hpp"
#include "wbr/estimator.hpp"

namespace wbr {

/// Why a run stopped early.
enum class Termination { running, fallen, diverged };

/**
 * Complete simulated plant: the sagittal wheel-rod-head chain plus the
 * decoupled yaw, roll, split-angle and leg-length axes.
 *
 * Roll is integrated as the body-vs-contact-line deviation chi; the absolute
 * roll is psi = chi + contact line tilt from the terrain. Per-side leg
 * lengths follow from the mean length and the roll deviation.
 */
struct FullPlantState {
  SagittalVec sagittal = SagittalVec::Zero();  ///< gamma, theta, x, rates
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double chi = 0.0;       ///< roll relative to the contact line (rad)
  double chi_rate = 0.0;
  double psi = 0.0;       ///< absolute body roll (rad), chi + contact tilt
  double psi_rate = 0.0;
  double leg_mean = 0.25;     ///< mean leg length (m)
  double leg_mean_rate = 0.0;
  double split = 0.0;         ///< theta_right - theta_left (rad)
  double split_rate = 0.0;
  double sigma2_left = 0.0;   ///< per-side knee angles implied by the leg lengths
  double sigma2_right = 0.0;
  double time = 0.0;
  Termination termination = Termination::running;
  Eigen::Vector3d last_qdd = Eigen::Vector3d::Zero();
  ContactForces last_forces;
};

/// Piecewise reference segment; scalar channels interpolate linearly from
/// `start` to `end`, the split channel may ride a sinusoid instead.
struct RefSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  ReferenceInput start;
  ReferenceInput end;
  bool split_sine = false;
  double split_amp = 0.0;
  double split_freq = 0.0;  ///< Hz
};

struct Impulse {
  double time = 0.0;
  double momentum = 0.0;  ///< N s applied to the forward axis
};

/// Piecewise-linear profile sampled by x (terrain) with flat extrapolation.
struct Profile {
  std::vector<std::pair<double, double>> knots;  ///< (x, value), sorted by x
  double eval(double x) const;
  bool empty() const { return knots.empty(); }
};

struct NoiseConfig {
  bool enabled = false;
  double gyro_std = 0.005;      ///< rad/s
  double accel_std = 0.05;      ///< m/s^2
  double gyro_bias = 0.002;     ///< rad/s, constant on every gyro axis
  double imu_pitch_bias = 0.0;  ///< rad, constant IMU mounting offset
};

struct Scenario {
  std::string name;
  double duration = 10.0;
  std::vector<RefSegment> segments;       ///< contiguous, sorted, covering [0, duration]
  std::vector<Impulse> impulses;
  Profile terrain_slope;                  ///< sagittal slope (rad) vs x
  Profile side_height;                    ///< single-side wheel height offset (m) vs x
  NoiseConfig noise;
  uint64_t seed = 0;
  double initial_leg = 0.25;              ///< leg length at t = 0 (m)
  double relinearize_pitch = 0.0;         ///< operating pitch for gain synthesis

  /// Throws std::invalid_argument when segments are absent, overlap or
  /// leave gaps.
  void validate() const;
  ReferenceInput reference_at(double t) const;
};

struct LogRow {
  double time;
  // plant truth
  double gamma, theta, x, gamma_dot, theta_dot, x_dot;
  double yaw, yaw_rate, psi, psi_rate, split;
  double leg_mean, sigma2_left, sigma2_right;
  // estimates
  double gamma_hat, theta_hat, x_hat, x_dot_hat, psi_hat, yaw_hat;
  // references
  double gamma_d, x_d, v_d, psi_d, yaw_d, leg_d, split_d;
  // commands
  double tau_hip_l, tau_hip_r, tau_knee_l, tau_knee_r, tau_wheel_l, tau_wheel_r;
  /// bits 0..5: per-channel saturation in MixResult order;
  /// bit 6: gain lookup clamped outside the schedule span;
  /// bit 7: degenerate leg posture (knee Jacobian at zero).
  int sat_flags;
  double F_f, F_N, F_drive;
};

struct RunMetrics {
  double max_abs_pitch_error = 0.0;  ///< max |gamma - gamma_d| (rad)
  double max_abs_theta = 0.0;        ///< rad
  double roll_variation = 0.0;       ///< max psi - min psi (rad)
  double settling_time = 0.0;        ///< first time |pitch error| stays within 0.05 rad (s)
  double rms_velocity_error = 0.0;   ///< rms of x_dot - v_d (m/s)
  double max_abs_split_achieved = 0.0;  ///< max |split| (rad)
};

struct TrajectoryLog {
  std::string scenario;
  std::vector<LogRow> rows;
  RunMetrics metrics;
  Termination termination = Termination::running;
  double end_time = 0.0;
};

/// Metrics are always produced by this function, so recomputing them from
/// the rows reproduces the stored summary exactly.
RunMetrics compute_metrics(const std::vector<LogRow>& rows);

enum class SummaryMode { trailing_comments, sidecar };

/// CSV with a units-bearing header, one row per control tick. In sidecar
/// mode the summary goes to <path>.summary.txt instead of trailing '#'
/// lines. Files are written atomically.
void write_csv(const std::string& path, const TrajectoryLog& log,
               SummaryMode mode = SummaryMode::trailing_comments);
std::string csv_string(const TrajectoryLog& log, SummaryMode mode);

/**
 * Fixed-step deterministic plant. Physics advances at gains.physics_dt with
 * commands held between control ticks.
 */
class PlantSim {
public:
  PlantSim(const RobotParams& p, const Scenario& sc) : p_(p), sc_(sc) {}

  /// One physics step under constant motor commands.
  FullPlantState step(const FullPlantState& s, const MotorCommands& cmd, double dt) const;

  double contact_tilt(double x) const;   ///< roll of the wheel-contact line (rad)
  double sagittal_slope(double x) const;

private:
  RobotParams p_;
  Scenario sc_;
};

/// Closed loop of estimator, controllers, mixer and plant; bit-identical
/// logs for identical (scenario, seed) pairs.
TrajectoryLog run_scenario(const Scenario& sc, const RobotParams& p, const ControllerGains& g,
                           const GainSchedule& schedule);

/// The five stock scenarios: flat_tracking, pitch_hold, slope_roll,
/// spacewalk, step_disturbance.
std::vector<Scenario> builtin_scenarios();

/// Stock scenario by name, if it exists.
std::optional<Scenario> find_scenario(const std::string& name);

}  // namespace wbr
