#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wbr {

/// Config file could not be parsed. Carries the 1-based line number.
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// A parameter violated its validity constraint. Carries the field name.
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error("invalid parameter '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

/**
 * Physical constants of the planar wheel / rod / head model.
 *
 * The sagittal model lumps the two legs into a single variable-length rod
 * and the two wheels into one wheel, so m_L, m_w and I_w are stored per
 * side and doubled inside the dynamics; m_H, I_H, I_L, I_yaw and I_roll
 * describe single lumped bodies.
 *
 * Mass and inertia defaults are estimates for a ~23 kg desk-scale
 * platform (the geometry matches the reference hardware, the mass split
 * does not come with it); every value can be overridden from the config
 * file.
 */
struct RobotParams {
  double m_H = 12.5;    ///< head mass (kg), lumped body
  double m_L = 1.8;     ///< leg-linkage mass per side (kg)
  double m_w = 3.4;     ///< wheel mass incl. motor, per side (kg)
  double I_H = 0.18;     ///< head pitch inertia about its CoM (kg m^2)
  double I_L = 0.09408;  ///< lumped-rod inertia about the wheel axis at full extension (kg m^2)
  double I_w = 0.014861825;  ///< wheel spin inertia per wheel (kg m^2), 0.5*m_w*R^2
  double l = 0.05;      ///< hip-to-head-CoM distance (m)
  double beta0 = 1.5707963267948966;  ///< equilibrium head-CoM angle offset (rad); pi/2 puts CoM above the hip
  double L_link = 0.140;   ///< linkage length, all three distal links equal (m)
  double L1 = 0.090;       ///< hip offset link (m); geometric constant, unused by the planar model
  double R = 0.0935;       ///< wheel radius (m)
  double L_w_frac = 0.5;   ///< rod CoM location from the hip as a fraction of rod length
  double g = 9.81;         ///< gravity (m/s^2)
  double track_width = 0.490;  ///< lateral wheel separation (m)
  double I_yaw = 1.1;    ///< body yaw inertia (kg m^2)
  double I_roll = 1.8;   ///< body roll inertia about the wheel-contact line (kg m^2)
  double tau_max = 17.0; ///< per-motor torque saturation (N m)
  int encoder_counts = 16384;  ///< encoder counts per revolution

  /// Throws ValidationError naming the offending field.
  void validate() const;

  // Derived quantities of the lumped planar model.
  double rod_mass() const { return 2.0 * m_L; }
  double wheel_mass_total() const { return 2.0 * m_w; }
  double wheel_inertia_total() const { return 2.0 * I_w; }
  double total_mass() const { return m_H + rod_mass() + wheel_mass_total(); }
  double leg_ref_length() const { return 2.0 * L_link; }
  /// Rod CoM distance from the wheel center at rod length L.
  double rod_com_from_wheel(double L) const { return (1.0 - L_w_frac) * L; }
  /// Rod inertia about its own CoM at rod length L. The stored I_L is the
  /// about-wheel-axis value at full extension; the CoM value scales with L^2.
  double rod_com_inertia(double L) const;
};

/**
 * Controller tuning: LQR penalties, auxiliary PD gains, loop rates and
 * estimator blend. Q/R defaults follow Bryson's rule from the maximum
 * acceptable deviations documented next to each entry.
 */
struct ControllerGains {
  // State order: gamma, theta, x, gamma_dot, theta_dot, x_dot, int_gamma, int_x.
  // Bryson maxima: 0.1 rad, 0.2 rad, 0.16 m, 1 rad/s, 2 rad/s, 0.5 m/s,
  // 0.07 rad s, 0.14 m s; the tight integral maxima place the integrator
  // poles near 1.2 rad/s instead of letting them crawl.
  std::array<double, 8> Q_diag = {100.0, 25.0, 40.0, 1.0, 0.25, 4.0, 200.0, 50.0};
  std::array<double, 2> R_diag = {0.01, 0.01};  // 10 N m acceptable excursion per input

  double kp_height = 2000.0;
  double kd_height = 300.0;
  double kp_roll = 60.0;
  double kd_roll = 8.0;
  double kp_split = 20.0;
  double kd_split = 1.0;

  std::array<double, 2> Q_yaw_diag = {20.0, 1.0};
  double R_yaw = 0.5;

  double control_dt = 0.002;   ///< controller period (s), 500 Hz
  double physics_dt = 0.001;   ///< integrator step (s)
  double filter_alpha = 0.98;  ///< complementary-filter gyro weight in [0, 1]
  double filter_bias_gain = 0.05;  ///< first-order gyro-bias observer gain

  int schedule_points = 12;        ///< gain-schedule grid size
  double schedule_min_leg = 0.15;  ///< schedule span lower bound (m)
  double schedule_max_leg = 0.28;  ///< schedule span upper bound (m)

  void validate() const;
};

/// Loads parameters from a `key = value` config file. Unknown keys are an
/// error; missing keys keep their defaults. Throws ConfigError on parse
/// failure and ValidationError on constraint violation.
std::pair<RobotParams, ControllerGains> load_params(const std::string& path);

/// Same as load_params but from an in-memory string.
std::pair<RobotParams, ControllerGains> parse_params(const std::string& text);

/// Serializes every key with full precision; parse_params(serialize_params(..))
/// reproduces the values bit for bit.
std::string serialize_params(const RobotParams& p, const ControllerGains& g);

/// Writes serialize_params output atomically (temp file + rename).
void save_params(const std::string& path, const RobotParams& p, const ControllerGains& g);

}  // namespace wbr
