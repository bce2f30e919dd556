#pragma once

#include <optional>

#include "hyoc/types.hpp"

namespace hyoc {

/// Dense convex QP
///
///   min  1/2 v'Pv + r'v + constant
///   s.t. A_eq v + b_eq  = 0
///        A_in v + b_in <= 0
///
/// Constraint blocks may have zero rows but must carry the variable count as
/// their column count.
struct QuadraticProgram {
  MatrixXd P;
  VectorXd r;
  double constant = 0.0;
  MatrixXd A_eq;
  VectorXd b_eq;
  MatrixXd A_in;
  VectorXd b_in;

  /// Unconstrained program with the given cost, constraint blocks sized 0 x n.
  static QuadraticProgram with_cost(const MatrixXd& P, const VectorXd& r, double constant = 0.0);

  Eigen::Index num_vars() const { return P.rows(); }
  double objective(const VectorXd& v) const { return 0.5 * v.dot(P * v) + r.dot(v) + constant; }

  /// Throws DimensionMismatch / InvalidArgument when the documented invariants fail
  /// (symmetry within 1e-12, PSD within -1e-9 * ||P||).
  void validate() const;
};

enum class QpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(QpStatus s);

/// Farkas certificate for {A_eq v + b_eq = 0, A_in v + b_in <= 0} = {}:
/// y_in >= 0, A_in' y_in + A_eq' y_eq = 0 and b_in' y_in + b_eq' y_eq > 0.
struct FarkasWitness {
  VectorXd y_eq;
  VectorXd y_in;
};

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  VectorXd v_star;
  VectorXd lambda_eq;
  VectorXd lambda_in;
  IndexList active_set;  ///< tight inequality rows at v_star
  double objective = 0.0;
  int iterations = 0;
  std::optional<FarkasWitness> witness;  ///< set when Infeasible
  VectorXd ray;                          ///< descent ray when Unbounded
};

struct QpWarmStart {
  std::optional<VectorXd> point;  ///< used only if feasible within 1e-9
  IndexList active_set;
};

/// Primal active-set method on the equality-reduced problem. Lagrangian sign
/// convention: P v + r + A_eq' lambda_eq + A_in' lambda_in = 0, lambda_in >= 0.
QpSolution solve_qp(const QuadraticProgram& qp, const QpWarmStart& warm = {});

struct LpFeasibility {
  bool feasible = false;
  VectorXd point;        ///< valid when feasible
  FarkasWitness witness; ///< valid when infeasible
};

/// Phase-1 feasibility of {A_eq v + b_eq = 0, A_in v + b_in <= 0}.
LpFeasibility lp_feasible(const MatrixXd& A_eq, const VectorXd& b_eq, const MatrixXd& A_in,
                          const VectorXd& b_in);

/// Orthonormal basis of N(A) using a rank-revealing QR with relative threshold rel_tol.
MatrixXd null_basis(const MatrixXd& A, double rel_tol = 1e-10);

/// A nonzero element of the polyhedral cone {d : E d = 0, K d <= 0}, or nullopt if
/// the cone is {0}. Either the lineality space N([E; K]) is nontrivial or some d has
/// sum(-K d) = 1, which is one LP.
std::optional<VectorXd> nonzero_cone_element(const MatrixXd& E, const MatrixXd& K);

}  // namespace hyoc
