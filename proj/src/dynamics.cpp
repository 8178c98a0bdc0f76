#include "wbr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbr {

namespace {

struct Gravity2 {
  double x;
  double z;
};

Gravity2 gravity_for_slope(const RobotParams& p, double slope) {
  return {-p.g * std::sin(slope), -p.g * std::cos(slope)};
}

struct ChainTerms {
  Eigen::Matrix3d M;      // symmetric mass matrix in (gamma, theta, x)
  Eigen::Vector3d h;      // centrifugal bias
  Eigen::Vector3d gradV;  // gravity gradient
  double m_rod, m_wheel, m_tot_eff, L_M, I_rc;
  double sg, cg, st, ct;  // sin/cos of (gamma + d0) and theta
};

// Assembles the Lagrangian terms of the wheel-rod-head chain at frozen rod
// length. d0 = pi/2 - beta0 is the head-CoM mounting offset (0 by default).
ChainTerms chain_terms(const SagittalVec& s, double L, const RobotParams& p, const Gravity2& gv) {
  ChainTerms t;
  const double d0 = 0.5 * M_PI - p.beta0;
  const double gamma = s[0], theta = s[1];
  const double gd = s[3], td = s[4];

  t.m_rod = p.rod_mass();
  t.m_wheel = p.wheel_mass_total();
  t.m_tot_eff = t.m_wheel + p.wheel_inertia_total() / (p.R * p.R) + t.m_rod + p.m_H;
  t.L_M = p.rod_com_from_wheel(L);
  t.I_rc = p.rod_com_inertia(L);

  t.sg = std::sin(gamma + d0);
  t.cg = std::cos(gamma + d0);
  t.st = std::sin(theta);
  t.ct = std::cos(theta);
  const double cd = std::cos(theta - gamma - d0);
  const double sd = std::sin(theta - gamma - d0);

  const double m_rl = t.m_rod * t.L_M + p.m_H * L;  // first moment of rod+head about the axle

  t.M(0, 0) = p.I_H + p.m_H * p.l * p.l;
  t.M(0, 1) = p.m_H * L * p.l * cd;
  t.M(0, 2) = p.m_H * p.l * t.cg;
  t.M(1, 1) = t.I_rc + t.m_rod * t.L_M * t.L_M + p.m_H * L * L;
  t.M(1, 2) = m_rl * t.ct;
  t.M(2, 2) = t.m_tot_eff;
  t.M(1, 0) = t.M(0, 1);
  t.M(2, 0) = t.M(0, 2);
  t.M(2, 1) = t.M(1, 2);

  t.h[0] = -p.m_H * L * p.l * sd * td * td;
  t.h[1] = p.m_H * L * p.l * sd * gd * gd;
  t.h[2] = -p.m_H * p.l * t.sg * gd * gd - m_rl * t.st * td * td;

  t.gradV[0] = -p.m_H * p.l * (gv.x * t.cg - gv.z * t.sg);
  t.gradV[1] = -m_rl * (gv.x * t.ct - gv.z * t.st);
  t.gradV[2] = -(t.m_wheel + t.m_rod + p.m_H) * gv.x;
  return t;
}

Eigen::Vector3d input_forces(double tau_H, double tau_w, const RobotParams& p) {
  // Motor reactions: the hip torque acts +tau_H on the head and -tau_H on
  // the rod; the wheel torque rolls the wheel (+tau_w/R drive force) and
  // pushes the rod back with -tau_w.
  return {tau_H, -tau_H - tau_w, tau_w / p.R};
}

ContactForces back_substitute_forces(const SagittalVec& s, const Eigen::Vector3d& qdd, double L,
                                     const RobotParams& p, const ChainTerms& t, const Gravity2& gv) {
  ContactForces f;
  const double gd = s[3], td = s[4];
  const double xdd = qdd[2], tdd = qdd[1], gdd = qdd[0];

  const double xdd_H = xdd + L * (t.ct * tdd - t.st * td * td) + p.l * (t.cg * gdd - t.sg * gd * gd);
  const double zdd_H = -L * (t.st * tdd + t.ct * td * td) - p.l * (t.sg * gdd + t.cg * gd * gd);
  f.F_x1 = p.m_H * (xdd_H - gv.x);
  f.F_z1 = p.m_H * (zdd_H - gv.z);

  const double xdd_L = xdd + t.L_M * (t.ct * tdd - t.st * td * td);
  const double zdd_L = -t.L_M * (t.st * tdd + t.ct * td * td);
  f.F_x2 = t.m_rod * (xdd_L - gv.x) + f.F_x1;
  f.F_z2 = t.m_rod * (zdd_L - gv.z) + f.F_z1;

  f.F_f = t.m_wheel * (xdd - gv.x) + f.F_x2;
  f.F_N = -t.m_wheel * gv.z + f.F_z2;
  return f;
}

void check_rod_length(double L, const RobotParams& p) {
  if (!(L > 0.0 && L <= p.leg_ref_length() + 1e-12))
    throw std::domain_error("rod length out of (0, 2*L_link]");
}

}  // namespace

SagittalAccel sagittal_accel(const SagittalVec& s, double tau_H, double tau_w, double L,
                             const RobotParams& p, double slope) {
  check_rod_length(L, p);
  const Gravity2 gv = gravity_for_slope(p, slope);
  const ChainTerms t = chain_terms(s, L, p, gv);

  const Eigen::Vector3d rhs = input_forces(tau_H, tau_w, p) - t.h - t.gradV;
  Eigen::LLT<Eigen::Matrix3d> llt(t.M);
  // The mass matrix is positive definite for any valid parameter set.
  if (llt.info() != Eigen::Success) throw std::runtime_error("singular sagittal mass matrix");

  SagittalAccel out;
  out.qdd = llt.solve(rhs);
  out.forces = back_substitute_forces(s, out.qdd, L, p, t, gv);
  return out;
}

PlanarAccel nonlinear_accel(const PlanarPlantState& s, double tau_H, double tau_w,
                            const RobotParams& p) {
  SagittalVec v;
  v[0] = gamma_from_beta(s.beta, s.theta, p);
  v[1] = s.theta;
  v[2] = s.x;
  v[3] = -s.beta_dot - s.theta_dot;
  v[4] = s.theta_dot;
  v[5] = s.x_dot;
  const SagittalAccel a = sagittal_accel(v, tau_H, tau_w, s.L, p);
  PlanarAccel out;
  out.theta_ddot = a.qdd[1];
  out.beta_ddot = -a.qdd[0] - a.qdd[1];
  out.x_ddot = a.qdd[2];
  out.forces = a.forces;
  return out;
}

SagittalVec sagittal_rk4_step(const SagittalVec& s, double tau_H, double tau_w, double L,
                              const RobotParams& p, double dt, double slope) {
  auto f = [&](const SagittalVec& y) {
    SagittalVec d;
    d.head<3>() = y.tail<3>();
    d.tail<3>() = sagittal_accel(y, tau_H, tau_w, L, p, slope).qdd;
    return d;
  };
  const SagittalVec k1 = f(s);
  const SagittalVec k2 = f(s + 0.5 * dt * k1);
  const SagittalVec k3 = f(s + 0.5 * dt * k2);
  const SagittalVec k4 = f(s + dt * k3);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double mechanical_energy(const SagittalVec& s, double L, const RobotParams& p, double slope) {
  const Gravity2 gv = gravity_for_slope(p, slope);
  const ChainTerms t = chain_terms(s, L, p, gv);
  const Eigen::Vector3d qd = s.tail<3>();
  const double kinetic = 0.5 * qd.dot(t.M * qd);

  const double x = s[2];
  const double x_H = x + L * t.st + p.l * t.sg;
  const double z_H = L * t.ct + p.l * t.cg;
  const double x_L = x + t.L_M * t.st;
  const double z_L = t.L_M * t.ct;
  const double potential = -(gv.x * (p.m_H * x_H + t.m_rod * x_L + t.m_wheel * x) +
                             gv.z * (p.m_H * z_H + t.m_rod * z_L));
  return kinetic + potential;
}

LinearModel linearize(const RobotParams& p, double L0, double gamma_op) {
  check_rod_length(L0, p);
  const Gravity2 gv = gravity_for_slope(p, 0.0);
  const double d0 = 0.5 * M_PI - p.beta0;

  // Trim: rod angle placing the total CoM above the contact point, and the
  // hip torque holding the head at the operating pitch.
  const double m_rod = p.rod_mass();
  const double L_M = p.rod_com_from_wheel(L0);
  const double m_rl = m_rod * L_M + p.m_H * L0;
  const double s_op = std::sin(gamma_op + d0);
  const double theta_op = std::asin(std::clamp(-p.m_H * p.l * s_op / m_rl, -1.0, 1.0));
  const double tau_H_trim = -p.m_H * p.g * p.l * s_op;

  SagittalVec s0 = SagittalVec::Zero();
  s0[0] = gamma_op;
  s0[1] = theta_op;
  const ChainTerms t = chain_terms(s0, L0, p, gv);

  // Gravity Hessian at the trim (V is separable in gamma and theta).
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  H(0, 0) = p.m_H * p.l * (gv.x * t.sg + gv.z * t.cg);
  H(1, 1) = m_rl * (gv.x * t.st + gv.z * t.ct);

  // Row transform putting the core into the a*qdd = b*q + c*u shape with
  // c = [[-1,0],[0,-1],[0,1/R]].
  Eigen::Matrix3d T;
  T << -1, 0, 0, 1, 1, 0, 0, 0, 1;

  LinearModel m;
  m.a = T * t.M;
  m.b = -T * H;
  m.c << -1, 0, 0, -1, 0, 1.0 / p.R;
  m.L0 = L0;
  m.gamma_op = gamma_op;
  m.theta_op = theta_op;
  m.tau_H_trim = tau_H_trim;

  const Eigen::Matrix3d a_inv_b = m.a.partialPivLu().solve(m.b);
  const Eigen::Matrix<double, 3, 2> a_inv_c = m.a.partialPivLu().solve(m.c);

  m.A.setZero();
  m.A.block<3, 3>(0, 3).setIdentity();
  m.A.block<3, 3>(3, 0) = a_inv_b;
  m.A(6, 0) = 1.0;  // d/dt int_gamma = gamma
  m.A(7, 2) = 1.0;  // d/dt int_x = x
  m.B.setZero();
  m.B.block<3, 2>(3, 0) = a_inv_c;
  m.C.setIdentity();
  return m;
}

int controllability_rank(const LinearModel& m) {
  Eigen::Matrix<double, 8, 16> K;
  Mat82 AB = m.B;
  for (int k = 0; k < 8; ++k) {
    K.block<8, 2>(0, 2 * k) = AB;
    AB = m.A * AB;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 16>> svd(K);
  const auto& sv = svd.singularValues();
  const double tol = 1e-8 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank;
}

}  // namespace wbr
