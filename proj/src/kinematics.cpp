#include "wbr/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbr {

ControlAngles joint_to_control_state(const JointState& j, const RobotParams& p) {
  ControlAngles c;
  c.gamma = j.gamma;
  c.theta = j.gamma + j.sigma1 + 0.5 * j.sigma2;
  c.x = p.R * (j.gamma + j.sigma1 + j.sigma2 + j.sigma3);
  return c;
}

double leg_length(double sigma2, const RobotParams& p) {
  if (!(std::abs(sigma2) < M_PI)) throw std::domain_error("leg_length: |sigma2| must be < pi");
  return 2.0 * p.L_link * std::cos(0.5 * sigma2);
}

double sigma2_for_leg_length(double length, const RobotParams& p) {
  const double full = 2.0 * p.L_link;
  const double c = std::clamp(length / full, 1e-9, 1.0);
  return 2.0 * std::acos(c);
}

double leg_jacobian(double sigma2, const RobotParams& p) {
  return -p.L_link * std::sin(0.5 * sigma2);
}

double robot_height(double L_leg, double theta) { return L_leg * std::cos(theta); }

ComPositions com_positions(double theta, double beta, double x, double L, const RobotParams& p) {
  ComPositions r;
  const double a = beta + theta;  // hip-to-head-CoM direction from the horizontal
  r.head.x = x + L * std::sin(theta) + p.l * std::cos(a);
  r.head.z = L * std::cos(theta) + p.l * std::sin(a);
  const double Lm = p.rod_com_from_wheel(L);
  r.rod.x = x + Lm * std::sin(theta);
  r.rod.z = Lm * std::cos(theta);
  return r;
}

}  // namespace wbr
