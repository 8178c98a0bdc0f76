#pragma once

#include "wbr/params.hpp"

namespace wbr {

enum class Side { left, right };

/// Motor-side coordinates for one leg: head pitch plus hip, knee and wheel
/// motor angles with their rates. sigma2 >= 0 shortens the leg.
struct JointState {
  double gamma = 0.0;   ///< head pitch from the estimator (rad)
  double sigma1 = 0.0;  ///< hip motor angle (rad)
  double sigma2 = 0.0;  ///< knee motor angle (rad), |sigma2| < pi
  double sigma3 = 0.0;  ///< wheel motor angle (rad)
  double gamma_dot = 0.0;
  double sigma1_dot = 0.0;
  double sigma2_dot = 0.0;
  double sigma3_dot = 0.0;
  Side side = Side::left;
};

/// The 8-dimensional balance-controller state:
/// [gamma, theta, x, gamma_dot, theta_dot, x_dot, int_gamma, int_x].
struct ControlState {
  double gamma = 0.0;      ///< head pitch (rad)
  double theta = 0.0;      ///< rod pendulum angle (rad)
  double x = 0.0;          ///< wheel-center horizontal displacement (m)
  double gamma_dot = 0.0;
  double theta_dot = 0.0;
  double x_dot = 0.0;
  double int_gamma = 0.0;  ///< accumulated pitch integral (rad s)
  double int_x = 0.0;      ///< accumulated position integral (m s)
};

struct PlanarPoint {
  double x = 0.0;
  double z = 0.0;
};

/// (gamma, theta, x) from motor angles:
///   theta = gamma + sigma1 + sigma2/2,  x = R*(gamma + sigma1 + sigma2 + sigma3).
struct ControlAngles {
  double gamma;
  double theta;
  double x;
};
ControlAngles joint_to_control_state(const JointState& j, const RobotParams& p);

/// Hip-to-wheel distance 2*L_link*cos(sigma2/2). Throws std::domain_error
/// for |sigma2| >= pi (knee folded through itself).
double leg_length(double sigma2, const RobotParams& p);

/// Knee angle realizing a given leg length (inverse of leg_length, the
/// sigma2 >= 0 branch). Length is clamped to (0, 2*L_link].
double sigma2_for_leg_length(double length, const RobotParams& p);

/// d(leg_length)/d(sigma2) = -L_link*sin(sigma2/2); the height-controller
/// Jacobian. Zero at full extension.
double leg_jacobian(double sigma2, const RobotParams& p);

/// Body height above the wheel axle: H = L_leg*cos(theta).
double robot_height(double L_leg, double theta);

/// CoM positions of the head and of the lumped rod, measured from the wheel
/// center at horizontal displacement x. beta is the hip-to-head-CoM angle of
/// the geometric convention beta = beta0 - gamma - theta.
struct ComPositions {
  PlanarPoint head;
  PlanarPoint rod;
};
ComPositions com_positions(double theta, double beta, double x, double L, const RobotParams& p);

}  // namespace wbr
