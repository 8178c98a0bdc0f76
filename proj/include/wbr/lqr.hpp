#pragma once

#include <string>
#include <vector>

#include "wbr/dynamics.hpp"
#include "wbr/params.hpp"

namespace wbr {

/// Gain synthesis failed (Riccati non-convergence or singular input map).
class SynthesisError : public std::runtime_error {
public:
  explicit SynthesisError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

/// Zero-order-hold discretization via the augmented matrix exponential,
/// evaluated by scaling-and-squaring with a machine-precision series.
struct DiscreteModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};
DiscreteModel discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt);

/// Matrix exponential used by discretize; exposed for testing.
Eigen::MatrixXd expm(const Eigen::MatrixXd& M);

/// Fixed-point solution of the discrete algebraic Riccati equation
///   P = A'PA - (A'PB)(R + B'PB)^-1(B'PA) + Q
/// starting from P0 = Q. Stops when the Frobenius step norm drops below
/// 1e-9*(1 + |P|_F); throws SynthesisError after 1e5 iterations or on a
/// singular (R + B'PB).
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

/// K = (R + B'PB)^-1 B'PA for a converged P.
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                         const Eigen::MatrixXd& R, const Eigen::MatrixXd& P);

/// Largest eigenvalue magnitude; used for closed-loop stability checks.
double spectral_radius(const Eigen::MatrixXd& M);

/// Balance gains tabulated over leg length, linearly interpolated at runtime.
struct GainSchedule {
  std::vector<double> grid;      ///< strictly increasing leg lengths (m)
  std::vector<GainMat> gains;    ///< one 2x8 gain per grid point
  double dt = 0.0;               ///< control period the gains were built for
  Vec8 Q = Vec8::Zero();         ///< state penalty diagonal used
  Eigen::Vector2d R = Eigen::Vector2d::Zero();  ///< input penalty diagonal used
  double gamma_op = 0.0;         ///< operating head pitch of the linearization
};

/// Synthesizes a schedule over [schedule_min_leg, schedule_max_leg]; every
/// point must stabilize its own discretized model. Throws SynthesisError
/// annotated with the failing leg length.
GainSchedule build_gain_schedule(const RobotParams& p, const ControllerGains& g, int n_grid,
                                 double gamma_op = 0.0);

/// Entrywise linear interpolation between bracketing grid points; queries
/// outside the span clamp to the end gains and set *clamped when provided.
GainMat lookup_gain(const GainSchedule& s, double L_leg, bool* clamped = nullptr);

/// Versioned text round trip for reuse across runs.
std::string serialize_schedule(const GainSchedule& s);
GainSchedule parse_schedule(const std::string& text);
void save_schedule(const std::string& path, const GainSchedule& s);
GainSchedule load_schedule(const std::string& path);

}  // namespace wbr
