#include <gtest/gtest.h>

#include "hyoc/qp.hpp"
#include "hyoc/rng.hpp"
#include "oracles.hpp"

using namespace hyoc;
using oracle::mat;
using oracle::vec;

namespace {

void expect_kkt(const QuadraticProgram& qp, const QpSolution& s) {
  ASSERT_EQ(s.status, QpStatus::Optimal);
  VectorXd res = qp.P * s.v_star + qp.r;
  if (qp.A_eq.rows() > 0) res += qp.A_eq.transpose() * s.lambda_eq;
  if (qp.A_in.rows() > 0) res += qp.A_in.transpose() * s.lambda_in;
  const double rn = qp.r.size() ? qp.r.cwiseAbs().maxCoeff() : 0.0;
  EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-8 * (1 + rn));
  if (qp.A_in.rows() > 0) {
    EXPECT_GE(s.lambda_in.minCoeff(), -1e-9);
    const VectorXd slack = qp.A_in * s.v_star + qp.b_in;
    EXPECT_LE(slack.maxCoeff(), 1e-9);
    EXPECT_LE(s.lambda_in.cwiseProduct(slack).cwiseAbs().maxCoeff(), 1e-8);
  }
  if (qp.A_eq.rows() > 0) EXPECT_LE((qp.A_eq * s.v_star + qp.b_eq).cwiseAbs().maxCoeff(), 1e-9);
}

}  // namespace

TEST(SolveQp, ProjectionOntoHalfLine) {
  auto qp = QuadraticProgram::with_cost(mat(1, 1, {1}), vec({0}));
  qp.A_in = mat(1, 1, {-1});
  qp.b_in = vec({1});
  const auto s = solve_qp(qp);
  expect_kkt(qp, s);
  EXPECT_NEAR(s.v_star(0), 1.0, 1e-12);
  EXPECT_NEAR(s.lambda_in(0), 1.0, 1e-12);
  EXPECT_EQ(s.active_set, IndexList{0});
}

TEST(SolveQp, EpigraphProjectionAtOrigin) {
  // min 1/2 (y - 1)^2 s.t. y >= 3, y >= 2 (four times, since x = u = 0)
  auto qp = QuadraticProgram::with_cost(mat(1, 1, {1}), vec({-1}), 0.5);
  qp.A_in = -MatrixXd::Ones(5, 1);
  qp.b_in = vec({3, 2, 2, 2, 2});
  const auto s = solve_qp(qp);
  expect_kkt(qp, s);
  EXPECT_NEAR(s.v_star(0), 3.0, 1e-12);
  EXPECT_NEAR(s.objective, 2.0, 1e-12);
}

TEST(SolveQp, EmptyFeasibleSetGivesFarkasWitness) {
  auto qp = QuadraticProgram::with_cost(mat(1, 1, {1}), vec({0}));
  qp.A_in = mat(2, 1, {-1, 1});
  qp.b_in = vec({1, 1});
  const auto s = solve_qp(qp);
  ASSERT_EQ(s.status, QpStatus::Infeasible);
  ASSERT_TRUE(s.witness.has_value());
  const auto& y = s.witness->y_in;
  EXPECT_GE(y.minCoeff(), -1e-12);
  EXPECT_LE((qp.A_in.transpose() * y).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GT(qp.b_in.dot(y), 0.0);
}

TEST(SolveQp, LinearCostUnboundedBelow) {
  auto qp = QuadraticProgram::with_cost(MatrixXd::Zero(2, 2), vec({1, 0}));
  qp.A_in = mat(1, 2, {0, 1});
  qp.b_in = vec({0});
  const auto s = solve_qp(qp);
  ASSERT_EQ(s.status, QpStatus::Unbounded);
  EXPECT_LT(qp.r.dot(s.ray), 0.0);
}

TEST(SolveQp, EqualityConstrained) {
  // min 1/2 |v|^2 s.t. v1 + v2 = 2
  auto qp = QuadraticProgram::with_cost(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  qp.A_eq = mat(1, 2, {1, 1});
  qp.b_eq = vec({-2});
  const auto s = solve_qp(qp);
  expect_kkt(qp, s);
  EXPECT_NEAR(s.v_star(0), 1.0, 1e-12);
  EXPECT_NEAR(s.v_star(1), 1.0, 1e-12);
}

TEST(SolveQp, RejectsIndefiniteHessian) {
  auto qp = QuadraticProgram::with_cost(mat(1, 1, {-1}), vec({0}));
  EXPECT_THROW(qp.validate(), Error);
}

TEST(SolveQp, WarmStartGivesSameSolution) {
  auto qp = QuadraticProgram::with_cost(MatrixXd::Identity(2, 2), vec({-3, -3}));
  qp.A_in = mat(2, 2, {1, 0, 0, 1});
  qp.b_in = vec({-1, -1});
  const auto cold = solve_qp(qp);
  QpWarmStart ws;
  ws.point = vec({0, 0});
  ws.active_set = {0};
  const auto warm = solve_qp(qp, ws);
  expect_kkt(qp, warm);
  EXPECT_LE((cold.v_star - warm.v_star).norm(), 1e-10);
}

TEST(LpFeasible, Examples) {
  const auto a = lp_feasible(mat(1, 1, {1}), vec({0}), mat(1, 1, {1}), vec({-1}));
  ASSERT_TRUE(a.feasible);
  EXPECT_NEAR(a.point(0), 0.0, 1e-12);
  const auto b = lp_feasible(MatrixXd(0, 1), VectorXd(0), mat(2, 1, {1, -1}), vec({1, 1}));
  EXPECT_FALSE(b.feasible);
}

TEST(NullBasis, OrthonormalAndAnnihilating) {
  const MatrixXd A = mat(2, 3, {1, 1, 0, 2, 2, 0});
  const MatrixXd Z = null_basis(A);
  ASSERT_EQ(Z.cols(), 2);
  EXPECT_LE((A * Z).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((Z.transpose() * Z - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NonzeroConeElement, PointedAndNontrivial) {
  // {d : d >= 0, d1 + d2 = 0} = {0}
  EXPECT_FALSE(nonzero_cone_element(mat(1, 2, {1, 1}), -MatrixXd::Identity(2, 2)).has_value());
  const auto d = nonzero_cone_element(MatrixXd(0, 2), -MatrixXd::Identity(2, 2));
  ASSERT_TRUE(d.has_value());
  EXPECT_GE(d->minCoeff(), -1e-12);
  EXPECT_GT(d->norm(), 0.0);
}

TEST(SolveQpProperty, MatchesProjectedGradientOnRandomBoxQps) {
  Rng rng(11, "test/qp-box");
  for (int t = 0; t < 40; ++t) {
    const int n = rng.uniform_int(1, 20);
    const int rank = rng.uniform_int(1, n);
    const MatrixXd L = rng.uniform_matrix(n, rank, -1, 1);
    const MatrixXd P = L * L.transpose() + 0.05 * MatrixXd::Identity(n, n);
    const VectorXd r = rng.uniform_vector(n, -2, 2);
    const VectorXd lo = rng.uniform_vector(n, -1.5, -0.1);
    const VectorXd hi = rng.uniform_vector(n, 0.1, 1.5);
    auto qp = QuadraticProgram::with_cost(P, r);
    qp.A_in = MatrixXd(2 * n, n);
    qp.A_in << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
    qp.b_in = VectorXd(2 * n);
    qp.b_in << -hi, lo;
    const auto s = solve_qp(qp);
    expect_kkt(qp, s);
    const VectorXd ref = oracle::projected_gradient(P, r, lo, hi, 1000000);
    EXPECT_NEAR(s.objective, qp.objective(ref), 1e-6) << "instance " << t;
    EXPECT_LE(s.objective, qp.objective(ref) + 1e-12);
  }
}

TEST(SolveQpProperty, KktOnRandomGeneralQps) {
  Rng rng(12, "test/qp-general");
  for (int t = 0; t < 100; ++t) {
    const int n = rng.uniform_int(1, 12);
    const int rank = rng.uniform_int(0, n);
    const MatrixXd L = rng.uniform_matrix(n, rank, -1, 1);
    const VectorXd v_feas = rng.uniform_vector(n, -1, 1);
    auto qp = QuadraticProgram::with_cost(L * L.transpose(), rng.uniform_vector(n, -1, 1));
    const int me = rng.uniform_int(0, n / 2);
    const int mi = rng.uniform_int(n, 3 * n);
    qp.A_eq = rng.uniform_matrix(me, n, -1, 1);
    qp.b_eq = -qp.A_eq * v_feas;
    qp.A_in = MatrixXd(mi + 2 * n, n);
    qp.A_in << rng.uniform_matrix(mi, n, -1, 1), MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
    qp.b_in = VectorXd(mi + 2 * n);
    qp.b_in.head(mi) = -(qp.A_in.topRows(mi) * v_feas) - rng.uniform_vector(mi, 0, 1);
    qp.b_in.tail(2 * n).setConstant(-3.0);
    const auto s = solve_qp(qp);
    expect_kkt(qp, s);
    EXPECT_LE(s.objective, qp.objective(v_feas) + 1e-9);
  }
}

TEST(SolveQpProperty, AgreesWithLpFeasibility) {
  Rng rng(13, "test/qp-feasibility");
  for (int t = 0; t < 100; ++t) {
    const int n = rng.uniform_int(1, 6);
    const int m = rng.uniform_int(1, 10);
    auto qp = QuadraticProgram::with_cost(MatrixXd::Identity(n, n), VectorXd::Zero(n));
    qp.A_in = rng.uniform_matrix(m, n, -1, 1);
    qp.b_in = rng.uniform_vector(m, -1, 1);
    const auto lp = lp_feasible(MatrixXd(0, n), VectorXd(0), qp.A_in, qp.b_in);
    const auto s = solve_qp(qp);
    EXPECT_EQ(lp.feasible, s.status == QpStatus::Optimal) << "instance " << t;
    if (lp.feasible) {
      EXPECT_LE((qp.A_in * lp.point + qp.b_in).maxCoeff(), 1e-9);
    }
  }
}
