#include <cmath>
#include <random>

#include "doctest.h"
#include "wbr/control.hpp"

using namespace wbr;

namespace {
const RobotParams P;
const ControllerGains G;
}  // namespace

TEST_CASE("balance law is exactly linear") {
  GainMat K = GainMat::Zero();
  K(0, 0) = 2.0;
  K(1, 2) = -1.5;
  ControlState X, X_d;

  SUBCASE("zero error gives zero torque") {
    X.gamma = X_d.gamma = 0.4;
    const BalanceTorques u = balance_control(K, X_d, X);
    CHECK(u.tau_H == 0.0);
    CHECK(u.tau_w == 0.0);
  }
  SUBCASE("doubling the error doubles the output") {
    X.gamma = 0.1;
    X.x = -0.2;
    const BalanceTorques u1 = balance_control(K, X_d, X);
    X.gamma = 0.2;
    X.x = -0.4;
    const BalanceTorques u2 = balance_control(K, X_d, X);
    CHECK(u2.tau_H == doctest::Approx(2.0 * u1.tau_H));
    CHECK(u2.tau_w == doctest::Approx(2.0 * u1.tau_w));
  }
  SUBCASE("golden-ratio scalar gain, unit error") {
    // K for the scalar A=B=Q=R=1 plant applied through the gamma channel.
    GainMat Kg = GainMat::Zero();
    Kg(0, 0) = 0.6180339887498949;
    X_d.gamma = 1.0;
    const BalanceTorques u = balance_control(Kg, X_d, X);
    CHECK(u.tau_H == doctest::Approx(0.618034).epsilon(1e-6));
  }
}

TEST_CASE("height controller") {
  SUBCASE("zero PD error leaves gravity feedforward only") {
    ReferenceInput ref;
    ref.L_leg_d = 0.25;
    const HeightTorque h = height_control(ref, 0.25, 0.0, P, G);
    const double J = leg_jacobian(sigma2_for_leg_length(0.25, P), P);
    CHECK(h.tau_knee == doctest::Approx(J * P.m_H * P.g).epsilon(1e-12));
    CHECK_FALSE(h.degenerate);
  }
  SUBCASE("fully extended leg cannot produce force") {
    ReferenceInput ref;
    ref.L_leg_d = 0.2;  // big error, but J = 0
    const HeightTorque h = height_control(ref, 0.28, 0.0, P, G);
    CHECK(h.tau_knee == doctest::Approx(0.0).scale(1.0));
    CHECK(h.degenerate);
  }
  SUBCASE("hand-evaluated PD output at sigma2 = pi/2") {
    RobotParams p = P;
    p.m_H = 122.6 / p.g;  // m_H * g = 122.6 N
    ControllerGains g = G;
    g.kp_height = 100.0;
    g.kd_height = 0.0;
    const double L = leg_length(M_PI / 2.0, p);
    ReferenceInput ref;
    ref.L_leg_d = L + 0.01;  // 0.01 m of extension error
    const HeightTorque h = height_control(ref, L, 0.0, p, g);
    CHECK(h.tau_knee == doctest::Approx(-12.236).epsilon(1e-3));
  }
}

TEST_CASE("roll PD") {
  CHECK(roll_control(0.1, 0.0, 0.1, 0.0, G) == 0.0);
  ControllerGains g = G;
  g.kp_roll = 10.0;
  g.kd_roll = 2.0;
  CHECK(roll_control(0.1, 0.0, 0.0, 0.0, g) == doctest::Approx(1.0));
  CHECK(roll_control(0.0, 0.05, 0.0, 0.0, g) == doctest::Approx(0.1));
}

TEST_CASE("yaw LQR") {
  const Eigen::RowVector2d K = synthesize_yaw_gain(P, G);
  CHECK(yaw_control(K, 0.0, 0.0) == 0.0);
  CHECK(yaw_control(K, 0.2, 0.1) == doctest::Approx(2.0 * yaw_control(K, 0.1, 0.05)));

  // Closed loop of the discretized yaw plant is stable.
  Eigen::Matrix2d A;
  A << 0, 1, 0, 0;
  Eigen::Vector2d B(0, P.track_width / (P.R * P.I_yaw));
  const DiscreteModel d = discretize(A, B, G.control_dt);
  CHECK(spectral_radius(d.A - d.B * K) < 1.0);
}

TEST_CASE("split-angle PD") {
  CHECK(split_angle_control(0.2, 0.0, 0.2, 0.0, G) == 0.0);
  ControllerGains g = G;
  g.kp_split = 5.0;
  g.kd_split = 0.0;
  CHECK(split_angle_control(0.1, 0.0, 0.0, 0.0, g) == doctest::Approx(0.5));
}

TEST_CASE("mixer superposition and clamping") {
  SUBCASE("all zero") {
    const MixResult r = mix_and_saturate(0, 0, 0, 0, 0, 0, P.tau_max);
    CHECK(r.cmd.tau_hip_l == 0.0);
    CHECK(r.cmd.tau_wheel_r == 0.0);
    for (bool s : r.saturated) CHECK_FALSE(s);
  }
  SUBCASE("wheel demand beyond stall clamps and flags") {
    const MixResult r = mix_and_saturate(0, 40.0, 0, 0, 0, 0, P.tau_max);
    CHECK(r.cmd.tau_wheel_l == doctest::Approx(17.0));
    CHECK(r.cmd.tau_wheel_r == doctest::Approx(17.0));
    CHECK(r.saturated[4]);
    CHECK(r.saturated[5]);
    CHECK(r.any_wheel_saturated());
  }
  SUBCASE("split torque is antisymmetric across the hips") {
    const MixResult r = mix_and_saturate(0, 0, 0, 0, 0, 1.0, P.tau_max);
    CHECK(r.cmd.tau_hip_l == doctest::Approx(1.0));
    CHECK(r.cmd.tau_hip_r == doctest::Approx(-1.0));
    CHECK(r.cmd.tau_hip_l + r.cmd.tau_hip_r == doctest::Approx(0.0));
  }
  SUBCASE("totals are conserved when nothing saturates") {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int k = 0; k < 200; ++k) {
      const double tH = d(eng), tw = d(eng), tk = d(eng);
      const double dr = d(eng), dy = d(eng), ds = d(eng);
      const MixResult r = mix_and_saturate(tH, tw, tk, dr, dy, ds, P.tau_max);
      bool any = false;
      for (bool s : r.saturated) any |= s;
      if (any) continue;
      CHECK(r.cmd.tau_hip_l + r.cmd.tau_hip_r == doctest::Approx(tH).epsilon(1e-12));
      CHECK(r.cmd.tau_wheel_l + r.cmd.tau_wheel_r == doctest::Approx(tw).epsilon(1e-12));
    }
  }
  SUBCASE("commands never exceed the torque limit") {
    std::mt19937_64 eng(12);
    std::uniform_real_distribution<double> d(-60.0, 60.0);
    for (int k = 0; k < 500; ++k) {
      const MixResult r =
          mix_and_saturate(d(eng), d(eng), d(eng), d(eng), d(eng), d(eng), P.tau_max);
      for (double v : {r.cmd.tau_hip_l, r.cmd.tau_hip_r, r.cmd.tau_knee_l, r.cmd.tau_knee_r,
                       r.cmd.tau_wheel_l, r.cmd.tau_wheel_r}) {
        CHECK(std::abs(v) <= P.tau_max);
      }
    }
  }
}

TEST_CASE("integrators hold while a wheel channel saturates") {
  const GainSchedule s = build_gain_schedule(P, G, G.schedule_points);
  StateEstimator::Output est;
  est.leg_length = 0.25;
  est.state.x = 5.0;  // enormous position error, wheels pinned at the limit

  MotionController sat_ctl(P, G, s);
  sat_ctl.reset();
  ReferenceInput ref;
  ref.L_leg_d = 0.25;
  const auto a1 = sat_ctl.tick(est, ref, G.control_dt);
  REQUIRE(a1.mix.any_wheel_saturated());
  const auto a2 = sat_ctl.tick(est, ref, G.control_dt);
  const auto a3 = sat_ctl.tick(est, ref, G.control_dt);
  // Held integrators: identical state in, identical unsaturated demand out.
  CHECK(a3.tau_w == doctest::Approx(a2.tau_w).epsilon(1e-12));

  MotionController free_ctl(P, G, s);
  free_ctl.reset();
  est.state.x = 0.05;  // small error, no saturation
  const auto b1 = free_ctl.tick(est, ref, G.control_dt);
  CHECK_FALSE(b1.mix.any_wheel_saturated());
  const auto b2 = free_ctl.tick(est, ref, G.control_dt);
  const auto b3 = free_ctl.tick(est, ref, G.control_dt);
  CHECK(b3.tau_w != doctest::Approx(b2.tau_w).epsilon(1e-12));
  (void)a1;
  (void)b1;
  (void)b2;
}

TEST_CASE("balance path alone stabilizes the linearized plant") {
  const GainSchedule s = build_gain_schedule(P, G, G.schedule_points);
  const double L0 = 0.25;
  const GainMat K = lookup_gain(s, L0);
  const LinearModel m = linearize(P, L0);
  const DiscreteModel d = discretize(m.A, m.B, G.control_dt);

  std::mt19937_64 eng(21);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 8; ++trial) {
    Vec8 X;
    for (int i = 0; i < 8; ++i) X[i] = n01(eng);
    X *= 0.3 / X.norm();
    for (int k = 0; k < 2500; ++k) {  // 5 s at 500 Hz
      const Eigen::Vector2d u = K * (Vec8::Zero() - X);
      X = d.A * X + d.B * u;
    }
    CHECK(std::abs(X[0]) < 1e-3);  // gamma
    CHECK(std::abs(X[1]) < 1e-3);  // theta
  }
}
