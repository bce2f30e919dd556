#include "hyoc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace hyoc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Derived>
double inf_norm(const Eigen::MatrixBase<Derived>& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

// Minimum-norm least-squares solution of A x = b.
VectorXd lstsq(const MatrixXd& A, const VectorXd& b) {
  if (A.rows() == 0 || A.cols() == 0) return VectorXd::Zero(A.cols());
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
  cod.setThreshold(1e-12);
  return cod.solve(b);
}

// ---------------------------------------------------------------------------
// Phase-1 simplex for {C xi + d <= 0}, xi free. Dense tableau, Bland's rule.
// ---------------------------------------------------------------------------
struct Phase1Result {
  bool feasible = false;
  VectorXd xi;
  VectorXd farkas;  // w >= 0, C'w = 0, d'w > 0 when infeasible
};

Phase1Result phase1_simplex(const MatrixXd& C, const VectorXd& d) {
  const int m = static_cast<int>(C.rows());
  const int k = static_cast<int>(C.cols());
  Phase1Result out;
  if (m == 0) {
    out.feasible = true;
    out.xi = VectorXd::Zero(k);
    return out;
  }
  // Columns: [xi+ (k) | xi- (k) | slack (m) | artificial (m)], last column = rhs.
  const int n_struct = 2 * k + m;
  const int n_cols = n_struct + m;
  MatrixXd T = MatrixXd::Zero(m + 1, n_cols + 1);
  VectorXd sign(m);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    const double rhs = -d(i);
    sign(i) = rhs < 0 ? -1.0 : 1.0;
    T.block(i, 0, 1, k) = sign(i) * C.row(i);
    T.block(i, k, 1, k) = -sign(i) * C.row(i);
    T(i, 2 * k + i) = sign(i);
    T(i, n_cols) = sign(i) * rhs;
    if (sign(i) > 0) {
      basis[i] = 2 * k + i;  // slack
    } else {
      T(i, n_struct + i) = 1.0;
      basis[i] = n_struct + i;
    }
  }
  // Objective row holds reduced costs of sum(artificials); last entry = -objective.
  VectorXd cost = VectorXd::Zero(n_cols);
  for (int i = 0; i < m; ++i) cost(n_struct + i) = 1.0;
  T.row(m).head(n_cols) = cost.transpose();
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n_struct) T.row(m) -= T.row(i);
  }

  const double scale = std::max({1.0, inf_norm(C), inf_norm(d)});
  const double eps_rc = 1e-11 * scale;
  const double eps_piv = 1e-11 * scale;
  const int max_pivots = 50 * (m + n_cols) + 1000;
  std::vector<char> retired(n_cols, 0);  // artificials that left the basis never return

  for (int it = 0;; ++it) {
    if (it > max_pivots) throw Error(ErrorCode::Degenerate, "phase-1 simplex exceeded pivot cap");
    int enter = -1;
    for (int j = 0; j < n_cols; ++j) {
      if (retired[j]) continue;
      if (T(m, j) < -eps_rc) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best = kInf;
    for (int i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a > eps_piv) {
        const double ratio = T(i, n_cols) / a;
        const double tie = leave < 0 ? 0.0 : 1e-14 * std::max(1.0, std::abs(best));
        if (leave < 0 || ratio < best - tie || (std::abs(ratio - best) <= tie && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      // Phase-1 objective is bounded below by zero; an unbounded column can only
      // be numerical noise. Retire it.
      retired[enter] = 1;
      continue;
    }
    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    if (basis[leave] >= n_struct) retired[basis[leave]] = 1;
    basis[leave] = enter;
  }

  const double objective = -T(m, n_cols);
  VectorXd x = VectorXd::Zero(n_cols);
  for (int i = 0; i < m; ++i) x(basis[i]) = T(i, n_cols);
  out.xi = x.head(k) - x.segment(k, k);

  const double feas_tol = 1e-9 * std::max(1.0, inf_norm(d));
  if (objective <= feas_tol && (C * out.xi + d).maxCoeff() <= 1e-9 * scale) {
    out.feasible = true;
    return out;
  }
  // Duals y = c_B' B^{-1}; B^{-1} columns are the tableau columns of the initial basis.
  VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const int col0 = sign(i) > 0 ? 2 * k + i : n_struct + i;
    // reduced cost of the initial basic column = c_col0 - y' e_i (after sign flip).
    const double c0 = sign(i) > 0 ? 0.0 : 1.0;
    const double a_coef = sign(i) > 0 ? sign(i) : 1.0;  // original column entry
    y(i) = (c0 - T(m, col0)) / a_coef;
  }
  VectorXd w = -(sign.asDiagonal() * y);
  w = w.cwiseMax(0.0);
  out.feasible = false;
  out.farkas = w;
  return out;
}

// ---------------------------------------------------------------------------
// Active-set QP on min 1/2 xi'H xi + g0'xi  s.t.  C xi + d <= 0 from a feasible xi.
// ---------------------------------------------------------------------------
struct ReducedResult {
  QpStatus status = QpStatus::Optimal;
  VectorXd xi;
  VectorXd lambda;  // per inequality row
  IndexList working;
  VectorXd ray;
  int iterations = 0;
};

enum class StepKind { Newton, Ray };

ReducedResult active_set(const MatrixXd& H, const VectorXd& g0, const MatrixXd& C,
                         const VectorXd& d, VectorXd xi, IndexList working) {
  const int k = static_cast<int>(H.rows());
  const int m = static_cast<int>(C.rows());
  ReducedResult res;
  std::vector<char> in_w(m, 0);
  for (int i : working) in_w[i] = 1;

  const double h_scale = std::max(1.0, inf_norm(H));
  const int max_iter = 30 * (m + k) + 500;
  int zero_steps = 0;

  for (int it = 0;; ++it) {
    if (it > max_iter) throw Error(ErrorCode::Degenerate, "active-set iteration cap reached (cycling)");
    res.iterations = it;
    const VectorXd g = H * xi + g0;
    MatrixXd A_w(static_cast<Eigen::Index>(working.size()), k);
    for (size_t j = 0; j < working.size(); ++j) A_w.row(static_cast<Eigen::Index>(j)) = C.row(working[j]);

    VectorXd p = VectorXd::Zero(k);
    StepKind kind = StepKind::Newton;
    const MatrixXd Z = null_basis(A_w);
    if (Z.cols() > 0) {
      const MatrixXd Hr = Z.transpose() * H * Z;
      const VectorXd gr = Z.transpose() * g;
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Hr);
      const VectorXd& lam = eig.eigenvalues();
      const MatrixXd& U = eig.eigenvectors();
      const double lam_max = std::max(1.0, lam.cwiseAbs().maxCoeff());
      const double zero_tol = 1e-11 * std::max(lam_max, h_scale);
      const VectorXd c = U.transpose() * gr;
      VectorXd ray_r = VectorXd::Zero(Z.cols());
      VectorXd newton_r = VectorXd::Zero(Z.cols());
      for (Eigen::Index j = 0; j < lam.size(); ++j) {
        if (lam(j) < -1e-9 * h_scale) throw Error(ErrorCode::InvalidArgument, "reduced Hessian is indefinite");
        if (lam(j) <= zero_tol) {
          if (lam(j) > 1e-2 * zero_tol && std::abs(c(j)) > 1e-9 * std::max(1.0, inf_norm(g)))
            throw Error(ErrorCode::IllConditioned, "reduced Hessian curvature is numerically ambiguous");
          ray_r -= c(j) * U.col(j);
        } else {
          newton_r -= (c(j) / lam(j)) * U.col(j);
        }
      }
      if (inf_norm(ray_r) > 1e-12 * std::max(1.0, inf_norm(g))) {
        kind = StepKind::Ray;
        p = Z * ray_r;
      } else {
        p = Z * newton_r;
      }
    }

    if (kind == StepKind::Newton && inf_norm(p) <= 1e-12 * std::max(1.0, inf_norm(xi))) {
      // Subspace minimizer: inspect multipliers of the working inequalities.
      VectorXd lam_w = VectorXd::Zero(static_cast<Eigen::Index>(working.size()));
      if (!working.empty()) {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(A_w.transpose());
        lam_w = qr.solve(-g);
      }
      const double mult_tol = 1e-10 * std::max(1.0, inf_norm(g));
      int drop = -1;
      if (zero_steps > 3) {
        // Bland: lowest constraint index with a negative multiplier.
        for (size_t j = 0; j < working.size(); ++j) {
          if (lam_w(static_cast<Eigen::Index>(j)) < -mult_tol &&
              (drop < 0 || working[j] < working[static_cast<size_t>(drop)]))
            drop = static_cast<int>(j);
        }
      } else {
        double most = -mult_tol;
        for (size_t j = 0; j < working.size(); ++j) {
          const double l = lam_w(static_cast<Eigen::Index>(j));
          if (l < most || (drop >= 0 && l == most && working[j] < working[static_cast<size_t>(drop)])) {
            most = l;
            drop = static_cast<int>(j);
          }
        }
      }
      if (drop < 0) {
        res.status = QpStatus::Optimal;
        res.xi = xi;
        res.lambda = VectorXd::Zero(m);
        for (size_t j = 0; j < working.size(); ++j)
          res.lambda(working[j]) = std::max(0.0, lam_w(static_cast<Eigen::Index>(j)));
        res.working = working;
        return res;
      }
      in_w[working[static_cast<size_t>(drop)]] = 0;
      working.erase(working.begin() + drop);
      continue;
    }

    // Ratio test, ties broken by lowest row index.
    double alpha = kind == StepKind::Ray ? kInf : 1.0;
    int block = -1;
    const double p_norm = inf_norm(p);
    for (int i = 0; i < m; ++i) {
      if (in_w[i]) continue;
      const double ap = C.row(i).dot(p);
      if (ap <= 1e-13 * std::max(1.0, C.row(i).cwiseAbs().maxCoeff()) * p_norm) continue;
      const double slack = std::max(0.0, -(C.row(i).dot(xi) + d(i)));
      const double step = slack / ap;
      if (step < alpha) {
        alpha = step;
        block = i;
      }
    }
    if (kind == StepKind::Ray && block < 0) {
      res.status = QpStatus::Unbounded;
      res.xi = xi;
      res.ray = p;
      res.working = working;
      return res;
    }
    xi += alpha * p;
    zero_steps = (alpha * p_norm <= 1e-14 * std::max(1.0, inf_norm(xi))) ? zero_steps + 1 : 0;
    if (block >= 0) {
      working.push_back(block);
      in_w[block] = 1;
    }
  }
}

struct EqReduction {
  bool consistent = true;
  VectorXd particular;
  MatrixXd basis;
  VectorXd residual;
};

EqReduction reduce_equalities(const MatrixXd& A_eq, const VectorXd& b_eq, Eigen::Index n) {
  EqReduction red;
  if (A_eq.rows() == 0) {
    red.particular = VectorXd::Zero(n);
    red.basis = MatrixXd::Identity(n, n);
    return red;
  }
  red.particular = lstsq(A_eq, -b_eq);
  red.residual = A_eq * red.particular + b_eq;
  const double tol = 1e-9 * std::max({1.0, inf_norm(b_eq), inf_norm(A_eq) * inf_norm(red.particular)});
  red.consistent = inf_norm(red.residual) <= tol;
  red.basis = null_basis(A_eq);
  return red;
}

void check_dims(const MatrixXd& A, const VectorXd& b, Eigen::Index n, const char* what) {
  require(A.rows() == b.size(), ErrorCode::DimensionMismatch, std::string(what) + " rows/rhs mismatch");
  require(A.rows() == 0 || A.cols() == n, ErrorCode::DimensionMismatch, std::string(what) + " column count");
}

MatrixXd sized(const MatrixXd& A, Eigen::Index n) { return A.rows() == 0 ? MatrixXd(0, n) : A; }

}  // namespace

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "Optimal";
    case QpStatus::Infeasible: return "Infeasible";
    case QpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

QuadraticProgram QuadraticProgram::with_cost(const MatrixXd& P, const VectorXd& r, double constant) {
  QuadraticProgram qp;
  qp.P = P;
  qp.r = r;
  qp.constant = constant;
  qp.A_eq = MatrixXd(0, P.rows());
  qp.b_eq = VectorXd(0);
  qp.A_in = MatrixXd(0, P.rows());
  qp.b_in = VectorXd(0);
  return qp;
}

void QuadraticProgram::validate() const {
  const auto n = P.rows();
  require(P.cols() == n && r.size() == n, ErrorCode::DimensionMismatch, "P/r dimensions");
  check_dims(A_eq, b_eq, n, "A_eq");
  check_dims(A_in, b_in, n, "A_in");
  if (n == 0) return;
  require((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, inf_norm(P)),
          ErrorCode::InvalidArgument, "P is not symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(P, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, inf_norm(P)), ErrorCode::InvalidArgument,
          "P is not positive semidefinite");
}

MatrixXd null_basis(const MatrixXd& A, double rel_tol) {
  const auto n = A.cols();
  if (A.rows() == 0) return MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A.transpose());
  qr.setThreshold(rel_tol);
  const auto rank = qr.rank();
  if (rank == n) return MatrixXd(n, 0);
  MatrixXd Q = qr.householderQ();
  return Q.rightCols(n - rank);
}

LpFeasibility lp_feasible(const MatrixXd& A_eq_in, const VectorXd& b_eq, const MatrixXd& A_in_in,
                          const VectorXd& b_in) {
  const Eigen::Index n = std::max(A_eq_in.cols(), A_in_in.cols());
  const MatrixXd A_eq = sized(A_eq_in, n);
  const MatrixXd A_in = sized(A_in_in, n);
  check_dims(A_eq, b_eq, n, "A_eq");
  check_dims(A_in, b_in, n, "A_in");

  LpFeasibility out;
  const EqReduction red = reduce_equalities(A_eq, b_eq, n);
  if (!red.consistent) {
    out.feasible = false;
    out.witness.y_eq = red.residual;
    out.witness.y_in = VectorXd::Zero(A_in.rows());
    return out;
  }
  const MatrixXd C = A_in * red.basis;
  const VectorXd d = A_in * red.particular + b_in;
  const Phase1Result p1 = phase1_simplex(C, d);
  if (p1.feasible) {
    out.feasible = true;
    out.point = red.particular + red.basis * p1.xi;
    return out;
  }
  out.feasible = false;
  out.witness.y_in = p1.farkas;
  // A_in' y_in lies in range(A_eq'); recover y_eq with A_in' y_in + A_eq' y_eq = 0.
  out.witness.y_eq = A_eq.rows() > 0 ? VectorXd(lstsq(A_eq.transpose(), -(A_in.transpose() * p1.farkas)))
                                     : VectorXd(0);
  return out;
}

QpSolution solve_qp(const QuadraticProgram& qp_in, const QpWarmStart& warm) {
  QuadraticProgram qp = qp_in;
  const auto n = qp.P.rows();
  qp.A_eq = sized(qp.A_eq, n);
  qp.A_in = sized(qp.A_in, n);
  if (qp.b_eq.size() == 0) qp.b_eq = VectorXd(0);
  if (qp.b_in.size() == 0) qp.b_in = VectorXd(0);
  qp.validate();

  QpSolution sol;
  const EqReduction red = reduce_equalities(qp.A_eq, qp.b_eq, n);
  if (!red.consistent) {
    sol.status = QpStatus::Infeasible;
    sol.witness = FarkasWitness{red.residual, VectorXd::Zero(qp.A_in.rows())};
    return sol;
  }
  const MatrixXd& Z0 = red.basis;
  const MatrixXd H = Z0.transpose() * qp.P * Z0;
  const VectorXd g0 = Z0.transpose() * (qp.P * red.particular + qp.r);
  const MatrixXd C = qp.A_in * Z0;
  const VectorXd d = qp.A_in * red.particular + qp.b_in;

  // Starting point: warm point if feasible, otherwise phase 1.
  VectorXd xi;
  IndexList working;
  bool have_start = false;
  if (warm.point && warm.point->size() == n) {
    const VectorXd& v0 = *warm.point;
    const double scale = std::max(1.0, inf_norm(v0));
    const bool eq_ok = qp.A_eq.rows() == 0 || inf_norm(qp.A_eq * v0 + qp.b_eq) <= 1e-9 * scale;
    const bool in_ok = qp.A_in.rows() == 0 || (qp.A_in * v0 + qp.b_in).maxCoeff() <= 1e-9 * scale;
    if (eq_ok && in_ok) {
      xi = Z0.transpose() * (v0 - red.particular);
      have_start = true;
    }
  }
  if (!have_start) {
    const Phase1Result p1 = phase1_simplex(C, d);
    if (!p1.feasible) {
      sol.status = QpStatus::Infeasible;
      FarkasWitness w;
      w.y_in = p1.farkas;
      w.y_eq = qp.A_eq.rows() > 0 ? VectorXd(lstsq(qp.A_eq.transpose(), -(qp.A_in.transpose() * p1.farkas)))
                                  : VectorXd(0);
      sol.witness = w;
      return sol;
    }
    xi = p1.xi;
  }
  // Warm working set: rows tight at the start, kept only while independent.
  for (int i : warm.active_set) {
    if (i < 0 || i >= C.rows()) continue;
    if (std::abs(C.row(i).dot(xi) + d(i)) > 1e-9 * std::max(1.0, std::abs(d(i)))) continue;
    MatrixXd A_w(static_cast<Eigen::Index>(working.size()) + 1, C.cols());
    for (size_t j = 0; j < working.size(); ++j) A_w.row(static_cast<Eigen::Index>(j)) = C.row(working[j]);
    A_w.row(A_w.rows() - 1) = C.row(i);
    if (null_basis(A_w).cols() == C.cols() - A_w.rows()) working.push_back(i);
  }

  const ReducedResult rr = active_set(H, g0, C, d, xi, working);
  sol.iterations = rr.iterations;
  sol.v_star = red.particular + Z0 * rr.xi;
  if (rr.status == QpStatus::Unbounded) {
    sol.status = QpStatus::Unbounded;
    sol.ray = Z0 * rr.ray;
    sol.objective = -kInf;
    return sol;
  }
  sol.status = QpStatus::Optimal;
  sol.lambda_in = rr.lambda;
  const VectorXd grad = qp.P * sol.v_star + qp.r + qp.A_in.transpose() * sol.lambda_in;
  sol.lambda_eq = qp.A_eq.rows() > 0 ? VectorXd(lstsq(qp.A_eq.transpose(), -grad)) : VectorXd(0);
  sol.objective = qp.objective(sol.v_star);
  if (qp.A_in.rows() > 0) {
    const VectorXd rows = qp.A_in * sol.v_star + qp.b_in;
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
      if (std::abs(rows(i)) <= 1e-9 * std::max(1.0, std::abs(qp.b_in(i)))) sol.active_set.push_back(static_cast<int>(i));
    }
  }
  return sol;
}

std::optional<VectorXd> nonzero_cone_element(const MatrixXd& E_in, const MatrixXd& K_in) {
  const Eigen::Index n = std::max(E_in.cols(), K_in.cols());
  const MatrixXd E = sized(E_in, n);
  const MatrixXd K = sized(K_in, n);
  if (n == 0) return std::nullopt;
  const MatrixXd lineality = null_basis(vstack(E, K));
  if (lineality.cols() > 0) return VectorXd(lineality.col(0));
  if (K.rows() == 0) return std::nullopt;
  MatrixXd A_eq(E.rows() + 1, n);
  A_eq << E, -K.colwise().sum();
  VectorXd b_eq = VectorXd::Zero(E.rows() + 1);
  b_eq(E.rows()) = -1.0;
  const LpFeasibility lp = lp_feasible(A_eq, b_eq, K, VectorXd::Zero(K.rows()));
  if (lp.feasible) return lp.point;
  return std::nullopt;
}

}  // namespace hyoc
