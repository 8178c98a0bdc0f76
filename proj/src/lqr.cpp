#include "wbr/lqr.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wbr {

Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd S = M / std::pow(2.0, squarings);

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * S) / static_cast<double>(k);
    result += term;
    if (term.norm() <= 1e-18 * result.norm()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

DiscreteModel discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be positive");
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = A * dt;
  aug.topRightCorner(n, m) = B * dt;
  const Eigen::MatrixXd E = expm(aug);
  return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  constexpr int kMaxIter = 100000;
  Eigen::MatrixXd P = Q;
  double residual = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::MatrixXd BtP = Bd.transpose() * P;
    const Eigen::MatrixXd G = R + BtP * Bd;
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success)
      throw SynthesisError("solve_dare: R + B'PB numerically singular", residual);
    const Eigen::MatrixXd BtPA = BtP * Ad;
    Eigen::MatrixXd next = Ad.transpose() * P * Ad - BtPA.transpose() * llt.solve(BtPA) + Q;
    next = 0.5 * (next + next.transpose().eval());
    residual = (next - P).norm();
    P = next;
    // Stop a factor below the documented residual bound so the returned
    // iterate satisfies |P - f(P)| <= 1e-9 (1 + |P|) with margin.
    if (residual <= 2.5e-10 * (1.0 + P.norm())) return P;
  }
  throw SynthesisError("solve_dare: no convergence after 1e5 iterations", residual);
}

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                         const Eigen::MatrixXd& R, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd G = R + Bd.transpose() * P * Bd;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw SynthesisError("lqr_gain: R + B'PB numerically singular");
  return llt.solve(Bd.transpose() * P * Ad);
}

double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

GainSchedule build_gain_schedule(const RobotParams& p, const ControllerGains& g, int n_grid,
                                 double gamma_op) {
  if (n_grid < 2) throw std::invalid_argument("build_gain_schedule: need at least 2 grid points");

  GainSchedule s;
  s.dt = g.control_dt;
  s.gamma_op = gamma_op;
  for (int k = 0; k < 8; ++k) s.Q[k] = g.Q_diag[k];
  s.R << g.R_diag[0], g.R_diag[1];
  const Eigen::MatrixXd Q = s.Q.asDiagonal();
  const Eigen::MatrixXd R = s.R.asDiagonal();

  const double lo = g.schedule_min_leg;
  const double hi = g.schedule_max_leg;
  for (int i = 0; i < n_grid; ++i) {
    const double L = lo + (hi - lo) * static_cast<double>(i) / (n_grid - 1);
    try {
      const LinearModel m = linearize(p, L, gamma_op);
      const DiscreteModel d = discretize(m.A, m.B, g.control_dt);
      const Eigen::MatrixXd P = solve_dare(d.A, d.B, Q, R);
      const Eigen::MatrixXd K = lqr_gain(d.A, d.B, R, P);
      const double rho = spectral_radius(d.A - d.B * K);
      if (!(rho < 1.0 - 1e-6))
        throw SynthesisError("closed loop not stabilizing, spectral radius " + std::to_string(rho));
      s.grid.push_back(L);
      s.gains.push_back(K);
    } catch (const SynthesisError& e) {
      throw SynthesisError("gain schedule at leg length " + std::to_string(L) + ": " + e.what(),
                           e.residual());
    }
  }
  return s;
}

GainMat lookup_gain(const GainSchedule& s, double L_leg, bool* clamped) {
  if (clamped) *clamped = false;
  if (s.grid.empty()) throw std::logic_error("lookup_gain: empty schedule");
  if (L_leg <= s.grid.front()) {
    if (clamped && L_leg < s.grid.front()) *clamped = true;
    return s.gains.front();
  }
  if (L_leg >= s.grid.back()) {
    if (clamped && L_leg > s.grid.back()) *clamped = true;
    return s.gains.back();
  }
  size_t hi = 1;
  while (s.grid[hi] < L_leg) ++hi;
  const size_t lo = hi - 1;
  const double w = (L_leg - s.grid[lo]) / (s.grid[hi] - s.grid[lo]);
  return (1.0 - w) * s.gains[lo] + w * s.gains[hi];
}

std::string serialize_schedule(const GainSchedule& s) {
  std::string out = "wbr_gain_schedule_v1\n";
  char buf[400];
  std::snprintf(buf, sizeof buf, "dt = %.17g\ngamma_op = %.17g\n", s.dt, s.gamma_op);
  out += buf;
  out += "q =";
  for (int k = 0; k < 8; ++k) {
    std::snprintf(buf, sizeof buf, " %.17g", s.Q[k]);
    out += buf;
  }
  out += "\nr =";
  for (int k = 0; k < 2; ++k) {
    std::snprintf(buf, sizeof buf, " %.17g", s.R[k]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\npoints = %zu\n", s.grid.size());
  out += buf;
  for (size_t i = 0; i < s.grid.size(); ++i) {
    int n = std::snprintf(buf, sizeof buf, "%.17g", s.grid[i]);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 8; ++c)
        n += std::snprintf(buf + n, sizeof buf - n, " %.17g", s.gains[i](r, c));
    out += buf;
    out += '\n';
  }
  return out;
}

GainSchedule parse_schedule(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto fail = [](const std::string& what) -> std::runtime_error {
    return std::runtime_error("gain schedule: " + what);
  };
  if (!std::getline(in, line) || line != "wbr_gain_schedule_v1") throw fail("bad header");

  GainSchedule s;
  auto read_kv = [&](const char* key) {
    if (!std::getline(in, line)) throw fail(std::string("missing ") + key);
    std::istringstream ls(line);
    std::string k, eq;
    ls >> k >> eq;
    if (k != key || eq != "=") throw fail(std::string("expected ") + key);
    return ls;
  };

  { auto ls = read_kv("dt"); if (!(ls >> s.dt)) throw fail("bad dt"); }
  { auto ls = read_kv("gamma_op"); if (!(ls >> s.gamma_op)) throw fail("bad gamma_op"); }
  {
    auto ls = read_kv("q");
    for (int k = 0; k < 8; ++k)
      if (!(ls >> s.Q[k])) throw fail("bad q");
  }
  {
    auto ls = read_kv("r");
    for (int k = 0; k < 2; ++k)
      if (!(ls >> s.R[k])) throw fail("bad r");
  }
  size_t points = 0;
  { auto ls = read_kv("points"); if (!(ls >> points) || points < 2) throw fail("bad points"); }

  for (size_t i = 0; i < points; ++i) {
    if (!std::getline(in, line)) throw fail("truncated gain rows");
    std::istringstream ls(line);
    double L;
    if (!(ls >> L)) throw fail("bad grid value");
    GainMat K;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 8; ++c)
        if (!(ls >> K(r, c))) throw fail("bad gain entry");
    if (!s.grid.empty() && L <= s.grid.back()) throw fail("grid not strictly increasing");
    s.grid.push_back(L);
    s.gains.push_back(K);
  }
  return s;
}

void save_schedule(const std::string& path, const GainSchedule& s) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << serialize_schedule(s);
  }
  std::filesystem::rename(tmp, path);
}

GainSchedule load_schedule(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_schedule(buf.str());
}

}  // namespace wbr
