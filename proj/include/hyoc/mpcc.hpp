#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyoc/lc_model.hpp"
#include "hyoc/pwa_dc.hpp"
#include "hyoc/types.hpp"

namespace hyoc {

/// l(x, u) = 1/2 x'Qx + 1/2 u'Ru + q'x + r'u + constant
struct StageCost {
  MatrixXd Q;
  MatrixXd R;
  VectorXd q;
  VectorXd r;
  double constant = 0.0;

  double operator()(const VectorXd& x, const VectorXd& u) const {
    return 0.5 * x.dot(Q * x) + 0.5 * u.dot(R * u) + q.dot(x) + r.dot(u) + constant;
  }
};

/// Convex quadratic costs l_0 .. l_{N-1} and terminal l_N(x) = 1/2 x'Q_N x + q_N'x + c_N.
struct QuadraticStageCost {
  std::vector<StageCost> stages;
  MatrixXd Q_N;
  VectorXd q_N;
  double c_N = 0.0;

  int horizon() const { return static_cast<int>(stages.size()); }
  double terminal(const VectorXd& x) const { return 0.5 * x.dot(Q_N * x) + q_N.dot(x) + c_N; }
  /// xs = x_0 .. x_N, us = u_0 .. u_{N-1}
  double evaluate(const std::vector<VectorXd>& xs, const std::vector<VectorXd>& us) const;
  /// Every stage and the terminal cost are bounded below by zero.
  bool nonnegative() const;
  void validate(int n_x, int n_u) const;

  static QuadraticStageCost uniform(int N, const MatrixXd& Q, const MatrixXd& R, const MatrixXd& Q_N);
  /// 1/2 (|x_k|^2 + |u_k|^2) per stage and 1/2 |x_N|^2 at the end.
  static QuadraticStageCost benchmark(int n_x, int n_u, int N);
};

/// v = (u_0 .. u_{N-1}, x_1 .. x_N, w_0 .. w_{N-1}, a_0 .. a_{N-1}); x_0 is data.
struct StageLayout {
  int N = 0;
  int n_x = 0;
  int n_u = 0;
  int n_w = 0;
  int n_a = 0;

  int u(int k) const { return k * n_u; }
  int x(int k) const { return N * n_u + (k - 1) * n_x; }  ///< k = 1 .. N
  int w(int k) const { return N * (n_u + n_x) + k * n_w; }
  int a(int k) const { return N * (n_u + n_x + n_w) + k * n_a; }
  int n_v() const { return N * (n_u + n_x + n_w + n_a); }
  int n_comp() const { return N * n_w; }
};

/// min 1/2 v'Pv + r'v + constant
/// s.t. F_in v + f_in <= 0,  F_eq v + f_eq = 0,  0 <= G v + g  _|_  H v + h >= 0
struct MpccProblem {
  StageLayout layout;
  VectorXd x0;
  MatrixXd P;
  VectorXd r;
  double constant = 0.0;
  MatrixXd F_in;
  VectorXd f_in;
  MatrixXd F_eq;
  VectorXd f_eq;
  MatrixXd G;
  VectorXd g;
  MatrixXd H;
  VectorXd h;
  int dynamics_rows_per_stage = 0;  ///< F_eq rows per stage: n_x dynamics, then n_a aux rows
  LcModel model;
  LcModel reduced;  ///< aux-free form with blocks, used for per-stage LCPs
  int extra_vars = 0;  ///< trailing variables outside the stage layout (elastic slacks)

  int n_v() const { return layout.n_v() + extra_vars; }
  int n_comp() const { return layout.n_comp(); }
  double objective(const VectorXd& v) const { return 0.5 * v.dot(P * v) + r.dot(v) + constant; }
  VectorXd gradient(const VectorXd& v) const { return P * v + r; }

  VectorXd u(const VectorXd& v, int k) const { return v.segment(layout.u(k), layout.n_u); }
  VectorXd x(const VectorXd& v, int k) const { return k == 0 ? x0 : VectorXd(v.segment(layout.x(k), layout.n_x)); }
  VectorXd w(const VectorXd& v, int k) const { return v.segment(layout.w(k), layout.n_w); }
  VectorXd a(const VectorXd& v, int k) const { return v.segment(layout.a(k), layout.n_a); }

  /// Builds v from inputs and the LC simulation they induce (domain not checked).
  VectorXd rollout(const std::vector<VectorXd>& inputs) const;
  /// Builds v from explicit per-stage blocks; `a` may be empty (recomputed from the aux equalities).
  VectorXd pack(const std::vector<VectorXd>& us, const std::vector<VectorXd>& xs_1N, const std::vector<VectorXd>& ws,
                const std::vector<VectorXd>& as = {}) const;

  /// Largest violation of the non-complementarity constraints and of G,H >= 0.
  double infeasibility(const VectorXd& v) const;
};

/// Stage constraints, when given, are imposed on (x_k, u_k) for k = 0 .. N-1.
MpccProblem assemble(const LcModel& model, const QuadraticStageCost& cost, const VectorXd& x0, int N,
                     const std::optional<Polytope>& stage_constraints = std::nullopt);

struct ActiveSets {
  IndexList alpha;  ///< G v + g = 0 < H v + h
  IndexList beta;   ///< both zero
  IndexList gamma;  ///< G v + g > 0 = H v + h
  IndexList I_in;   ///< tight rows of F_in
};

/// Throws InfeasiblePoint when v violates a constraint by more than 1e-7.
ActiveSets active_sets(const MpccProblem& p, const VectorXd& v);

/// grad J + F_in'eta + F_eq'mu - G'nu_G - H'nu_H = 0
struct MpccMultipliers {
  VectorXd eta;
  VectorXd mu;
  VectorXd nu_G;
  VectorXd nu_H;
};

/// Classical KKT multipliers of the NLP with the complementarity written as (Gv+g)'(Hv+h) <= 0:
/// grad J + F_in'eta + F_eq'mu - G'nu_G - H'nu_H + xi (G'(Hv+h) + H'(Gv+g)) = 0.
struct KktMultipliers {
  VectorXd eta;
  VectorXd mu;
  VectorXd nu_G;
  VectorXd nu_H;
  double xi = 0.0;
};

/// Per-stage view: mu_k on the dynamics rows, nu_k on the E rows, lambda_k on w_k >= 0.
struct StageMultipliers {
  VectorXd mu;
  VectorXd nu;
  VectorXd lambda;
};

std::vector<StageMultipliers> stagewise(const MpccProblem& p, const MpccMultipliers& m);

enum class CertRegime {
  S,       ///< both biactive multipliers >= 0
  Global,  ///< every nu_G, nu_H >= 0
  MBranch  ///< per-biactive-index choice given by the branch vector
};

enum class BetaBranch { BothNonnegative, GZero, HZero };

std::optional<MpccMultipliers> certificate_lp(const MpccProblem& p, const VectorXd& v, CertRegime regime,
                                              const std::vector<BetaBranch>& branch = {});

/// Enumerates the 3^|beta| M-branches, S first. Throws SizeLimit when |beta| > 10.
std::optional<MpccMultipliers> find_m_certificate(const MpccProblem& p, const VectorXd& v);

/// Residual within 1e-7 and the S sign pattern at the active sets of v.
bool check_s_stationary(const MpccProblem& p, const VectorXd& v, const MpccMultipliers& m);

bool check_classical_kkt(const MpccProblem& p, const VectorXd& v, const KktMultipliers& k);

/// nu_G = nu_G_hat - xi (Hv + h),  nu_H = nu_H_hat - xi (Gv + g)
MpccMultipliers convert_multipliers(const MpccProblem& p, const VectorXd& v, const KktMultipliers& k);

/// Inverse map with the smallest xi that makes nu_G_hat, nu_H_hat nonnegative.
KktMultipliers to_kkt_multipliers(const MpccProblem& p, const VectorXd& v, const MpccMultipliers& m);

/// All nu_k, lambda_k >= -1e-8.
bool check_global_sufficient(const MpccProblem& p, const VectorXd& v, const MpccMultipliers& m);

/// No nonzero critical direction lies in N(P). Throws SizeLimit when |beta| > 16.
bool check_mssosc(const MpccProblem& p, const VectorXd& v);

struct InputTrajectoryCheck {
  bool locally_optimal = false;
  VectorXd witness;  ///< full v with the failing w when not locally optimal
  std::string reason;
  int representatives_checked = 0;
};

/// Sweeps one representative per face of every per-stage LCP solution set and requires
/// S-stationarity at each combination. Throws SizeLimit beyond 10^4 combinations.
InputTrajectoryCheck check_input_trajectory(const MpccProblem& p, const VectorXd& v);

}  // namespace hyoc
