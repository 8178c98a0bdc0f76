#pragma once

#include <Eigen/Dense>

#include "wbr/params.hpp"

namespace wbr {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat82 = Eigen::Matrix<double, 8, 2>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using GainMat = Eigen::Matrix<double, 2, 8>;

// Sign conventions used throughout the planar model:
//   gamma  head pitch, positive tips the head toward +x
//   theta  rod angle from vertical, positive leans toward +x
//   beta   hip-to-head-CoM angle from horizontal, beta = beta0 - gamma - theta
//   tau_H  hip torque acting on the head, positive tips the head toward +x
//   tau_w  wheel torque, positive rolls the wheel toward +x
// The reaction of each motor torque acts on the rod with opposite sign.

/// Sagittal plant state of the wheel-rod-head chain. The rod length L is a
/// slowly varying parameter, frozen during a dynamics evaluation.
struct PlanarPlantState {
  double theta = 0.0;
  double beta = 0.0;
  double x = 0.0;
  double theta_dot = 0.0;
  double beta_dot = 0.0;
  double x_dot = 0.0;
  double L = 0.25;      ///< current rod length (m), in (0, 2*L_link]
  double L_dot = 0.0;   ///< rod length rate, carried for logging only
};

/// Internal and ground-contact forces eliminated while solving the
/// Newton-Euler balances, returned for logging.
struct ContactForces {
  double F_f = 0.0;   ///< ground friction at the contact point (N)
  double F_N = 0.0;   ///< ground normal force (N)
  double F_x1 = 0.0;  ///< horizontal hip-joint force on the head (N)
  double F_z1 = 0.0;  ///< vertical hip-joint force on the head (N)
  double F_x2 = 0.0;  ///< horizontal axle force on the rod (N)
  double F_z2 = 0.0;  ///< vertical axle force on the rod (N)
};

struct PlanarAccel {
  double theta_ddot = 0.0;
  double beta_ddot = 0.0;
  double x_ddot = 0.0;
  ContactForces forces;
};

/// Generalized accelerations of the nonlinear sagittal plant under total hip
/// and wheel torques (flat ground). Total function for valid states.
PlanarAccel nonlinear_accel(const PlanarPlantState& s, double tau_H, double tau_w,
                            const RobotParams& p);

// gamma-form state vector [gamma, theta, x, gamma_dot, theta_dot, x_dot];
// the coordinates the controller and the linear model work in.
using SagittalVec = Eigen::Matrix<double, 6, 1>;

struct SagittalAccel {
  Eigen::Vector3d qdd;  ///< gamma_ddot, theta_ddot, x_ddot
  ContactForces forces;
};

/// Same dynamics in gamma coordinates. `slope` is the terrain pitch; it
/// rotates the gravity vector in the local frame.
SagittalAccel sagittal_accel(const SagittalVec& s, double tau_H, double tau_w, double L,
                             const RobotParams& p, double slope = 0.0);

/// One classical RK4 step of the sagittal ODE with torques held constant.
SagittalVec sagittal_rk4_step(const SagittalVec& s, double tau_H, double tau_w, double L,
                              const RobotParams& p, double dt, double slope = 0.0);

/// Kinetic plus gravitational energy of the sagittal chain (wheel spin
/// included, heights measured from the wheel axle).
double mechanical_energy(const SagittalVec& s, double L, const RobotParams& p,
                         double slope = 0.0);

/// Conversions between the geometric beta convention and head pitch.
inline double gamma_from_beta(double beta, double theta, const RobotParams& p) {
  return p.beta0 - beta - theta;
}
inline double beta_from_gamma(double gamma, double theta, const RobotParams& p) {
  return p.beta0 - gamma - theta;
}

/**
 * Linear state-space model around an operating point.
 *
 * The state is X = [gamma, theta, x, gamma_dot, theta_dot, x_dot,
 * int_gamma, int_x] and the input u = [tau_H, tau_w]. The second-order core
 * is stored as a*qdd = b*q + c*u with
 *     c = [[-1, 0], [0, -1], [0, 1/R]],
 * and A embeds a^-1*b in the block layout
 *     A = [ 0      I      0 ]
 *         [ a^-1 b 0      0 ]
 *         [ E      0      0 ],   E = [[1,0,0],[0,0,1]]
 * with B = [0; a^-1 c; 0] and C = I.
 *
 * For gamma_op != 0 the model is linearized at the trimmed equilibrium
 * (theta_op, tau_H_trim) where the total CoM sits above the contact point.
 */
struct LinearModel {
  Mat8 A = Mat8::Zero();
  Mat82 B = Mat82::Zero();
  Mat8 C = Mat8::Identity();
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  Eigen::Matrix<double, 3, 2> c = Eigen::Matrix<double, 3, 2>::Zero();
  double L0 = 0.0;
  double gamma_op = 0.0;
  double theta_op = 0.0;     ///< trimmed rod angle at the operating pitch
  double tau_H_trim = 0.0;   ///< hip torque holding the operating pitch
};

/// Analytic linearization at rod length L0 and operating head pitch.
/// Throws std::domain_error for L0 outside (0, 2*L_link].
LinearModel linearize(const RobotParams& p, double L0, double gamma_op = 0.0);

/// Numerical rank of [B, AB, ..., A^7 B]; singular values below
/// 1e-8 * sigma_max count as zero.
int controllability_rank(const LinearModel& m);

}  // namespace wbr
