#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "hyoc/mpcc.hpp"
#include "hyoc/pwa_dc.hpp"
#include "hyoc/qp.hpp"

namespace hyoc {

/// Which side of each complementarity pair is pinned to zero in a branch QP.
enum class Side { GActive, HActive };

using BranchAssignment = std::vector<Side>;

enum class SolveStatus { SStationary, Optimal, IterationLimit, Infeasible, Unbounded, SizeLimit, TimedOut };

const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  VectorXd v_star;  ///< MPCC layout for the local solver
  std::vector<VectorXd> u;
  std::vector<VectorXd> x;  ///< x_0 .. x_N
  std::vector<VectorXd> w;
  double objective = std::numeric_limits<double>::infinity();
  std::optional<MpccMultipliers> certificate;
  bool s_stationary = false;
  bool global_certified = false;
  std::optional<bool> mssosc;
  int iterations = 0;  ///< branch flips (local) or explored sequences (oracle)
  int qp_solves = 0;
  BranchAssignment assignment;
  std::vector<std::vector<int>> sequence;  ///< oracle: per stage, psi then phi piece index per component
};

struct LocalInit {
  std::optional<BranchAssignment> assignment;
  std::optional<VectorXd> point;
  std::optional<std::vector<VectorXd>> inputs;
};

struct LocalOptions {
  int max_flips = 500;
  int starts = 1;
  std::uint64_t seed = 0;
  double time_limit_s = std::numeric_limits<double>::infinity();
  bool check_mssosc = false;
};

/// Branch-pivoting active-set method: solve the convex QP of a branch, stop when an
/// S-stationarity certificate exists at its minimizer, otherwise flip the lowest biactive
/// index whose pinned-side multiplier is negative.
SolveReport solve_local(const MpccProblem& p, const LocalInit& init = {}, const LocalOptions& opt = {});

/// The convex QP of one branch.
QuadraticProgram branch_qp(const MpccProblem& p, const BranchAssignment& a);

/// alpha -> GActive, gamma and beta -> HActive.
BranchAssignment assignment_from_point(const MpccProblem& p, const VectorXd& v);

struct OracleOptions {
  std::optional<Polytope> stage_constraints;
  double time_limit_s = std::numeric_limits<double>::infinity();
  double max_sequences = 1e6;
};

/// Exhaustive search over per-stage argmax pieces of psi and phi; one convex QP per sequence.
SolveReport solve_global_oracle(const PwaDcSystem& sys, const QuadraticStageCost& cost, const VectorXd& x0, int N,
                                const OracleOptions& opt = {});

}  // namespace hyoc
