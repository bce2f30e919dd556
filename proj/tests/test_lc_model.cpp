#include <gtest/gtest.h>

#include <numeric>

#include "hyoc/lc_model.hpp"
#include "hyoc/rng.hpp"
#include "oracles.hpp"

using namespace hyoc;
using oracle::mat;
using oracle::vec;

namespace {

LcModel with_Ew(const MatrixXd& Ew) {
  LcModel m;
  const auto n = Ew.rows();
  m.A = MatrixXd::Zero(1, 1);
  m.B_u = MatrixXd::Zero(1, 1);
  m.B_w = MatrixXd::Ones(1, n);
  m.c = VectorXd::Zero(1);
  m.E_w = Ew;
  m.E_x = MatrixXd::Zero(n, 1);
  m.E_u = MatrixXd::Zero(n, 1);
  m.e = -VectorXd::Ones(n);
  m.domain = Polytope::box(2, -1, 1);
  return m;
}

LcModel permuted(const LcModel& m, const std::vector<int>& perm) {
  Eigen::PermutationMatrix<Eigen::Dynamic> P(static_cast<int>(perm.size()));
  for (size_t i = 0; i < perm.size(); ++i) P.indices()(static_cast<Eigen::Index>(i)) = perm[i];
  LcModel out = m;
  out.E_w = P * m.E_w * P.transpose();
  out.E_x = P * m.E_x;
  out.E_u = P * m.E_u;
  out.e = P * m.e;
  out.B_w = m.B_w * P.transpose();
  out.blocks.clear();
  return out;
}

}  // namespace

TEST(DetectBlocks, Examples) {
  auto b = detect_blocks(oracle::small_model());
  ASSERT_TRUE(b.ok);
  ASSERT_EQ(b.blocks.size(), 1u);
  EXPECT_EQ(b.blocks[0].indices, (IndexList{0, 1}));
  EXPECT_LE((b.blocks[0].m.cwiseAbs() - vec({1, 1})).norm(), 1e-12);

  b = detect_blocks(with_Ew(MatrixXd::Identity(2, 2)));
  ASSERT_TRUE(b.ok);
  EXPECT_EQ(b.blocks.size(), 2u);

  b = detect_blocks(with_Ew(mat(2, 2, {1, 0, 0, 0})));
  EXPECT_FALSE(b.ok);
  EXPECT_FALSE(b.reason.empty());

  b = detect_blocks(with_Ew(mat(2, 2, {2, 1, 1, 2})));
  EXPECT_FALSE(b.ok);
  b = detect_blocks(with_Ew(mat(2, 2, {1, 1, 0, 1})));
  EXPECT_FALSE(b.ok);
}

TEST(DetectBlocks, PermutationInvariant) {
  Rng rng(31, "test/blocks");
  for (int t = 0; t < 30; ++t) {
    const int nb = rng.uniform_int(1, 3);
    std::vector<VectorXd> ms;
    int n = 0;
    for (int b = 0; b < nb; ++b) {
      const int size = rng.uniform_int(1, 3);
      VectorXd m(size);
      for (int i = 0; i < size; ++i) m(i) = rng.uniform(0.5, 2.0) * (rng.uniform(0, 1) < 0.5 ? -1 : 1);
      ms.push_back(m);
      n += size;
    }
    MatrixXd Ew = MatrixXd::Zero(n, n);
    int off = 0;
    for (const auto& m : ms) {
      Ew.block(off, off, m.size(), m.size()) = m * m.transpose();
      off += static_cast<int>(m.size());
    }
    const LcModel base = with_Ew(Ew);
    const auto ref = detect_blocks(base);
    ASSERT_TRUE(ref.ok);
    ASSERT_EQ(static_cast<int>(ref.blocks.size()), nb);
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    const LcModel pm = permuted(base, perm);
    const auto got = detect_blocks(pm);
    ASSERT_TRUE(got.ok);
    ASSERT_EQ(got.blocks.size(), ref.blocks.size());
    // Each detected block reproduces its slice of the permuted E_w, and the blocks partition all indices.
    std::vector<int> seen(static_cast<size_t>(n), 0);
    for (const auto& b : got.blocks) {
      for (size_t i = 0; i < b.indices.size(); ++i) {
        ++seen[static_cast<size_t>(b.indices[i])];
        for (size_t j = 0; j < b.indices.size(); ++j)
          EXPECT_NEAR(pm.E_w(b.indices[i], b.indices[j]), b.m(static_cast<Eigen::Index>(i)) * b.m(static_cast<Eigen::Index>(j)),
                      1e-10);
      }
    }
    for (int s : seen) EXPECT_EQ(s, 1);
  }
}

TEST(Assumption1, Examples) {
  EXPECT_EQ(check_assumption1(oracle::small_model()).verdict, Verdict::Holds);
  LcModel zero = oracle::small_model();
  zero.B_w.setZero();
  EXPECT_EQ(check_assumption1(zero).verdict, Verdict::Holds);
  LcModel bad = oracle::small_model();
  bad.B_w = mat(1, 2, {1, 0});
  const auto r = check_assumption1(bad);
  EXPECT_EQ(r.verdict, Verdict::Fails);
  EXPECT_LE((r.direction - vec({1, -1})).norm(), 1e-9);
  LcModel copy = bad;
  EXPECT_EQ(check_assumptions(copy).a1, Verdict::Unknown);
}

TEST(Assumption3, Examples) {
  LcModel m = oracle::small_model();
  m.domain = Polytope::box(2, -10, 10);
  ASSERT_TRUE(check_assumptions(m).all_hold());
  EXPECT_EQ(check_assumption3(m).verdict, Verdict::Holds);

  LcModel zero = with_Ew(MatrixXd::Identity(1, 1));
  zero.e.setZero();
  check_assumptions(zero);
  const auto r = check_assumption3(zero);
  EXPECT_EQ(r.verdict, Verdict::Fails);
  EXPECT_EQ(r.block, 0);
  EXPECT_EQ(r.witness.size(), 2);
}

TEST(Step, SmallModel) {
  LcModel m = oracle::small_model();
  check_assumptions(m);
  auto s = step(m, vec({0}), vec({-1}));
  EXPECT_NEAR(s.x_plus(0), -1.0, 1e-9);
  EXPECT_NEAR(s.w.sum(), 1.0, 1e-9);
  s = step(m, vec({0}), vec({0}));
  EXPECT_NEAR(s.x_plus(0), -1.0, 1e-9);
}

TEST(Step, NonnegativeOffsetGivesAffineStep) {
  LcModel m = with_Ew(MatrixXd::Identity(2, 2));
  m.e = vec({1, 2});
  m.A = mat(1, 1, {0.5});
  m.B_u = mat(1, 1, {2});
  m.c = vec({1});
  check_assumptions(m);
  const auto s = step(m, vec({0.5}), vec({0.25}));
  EXPECT_NEAR(s.x_plus(0), 0.25 + 0.5 + 1.0, 1e-12);
  EXPECT_EQ(s.w, VectorXd::Zero(2));
}

TEST(Step, OutsideDomainThrows) {
  LcModel m = with_Ew(MatrixXd::Identity(1, 1));
  try {
    step(m, vec({2}), vec({0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
}

TEST(WellPosedness, SuccessorIndependentOfSelectedSolution) {
  LcModel m = oracle::small_model();
  check_assumptions(m);
  Rng rng(33, "test/wellposed");
  for (int t = 0; t < 50; ++t) {
    const VectorXd x = rng.uniform_vector(1, -3, 3);
    const VectorXd u = rng.uniform_vector(1, -3, 3);
    const auto s = step(m, x, u);
    const auto lcp = block_lcp(m, m.blocks[0], x, u);
    const auto set = solution_set(lcp, s.w);
    for (const auto& v : vertices(set)) {
      const VectorXd xp = m.A * x + m.B_u * u + m.B_w * v + m.c;
      EXPECT_LE((xp - s.x_plus).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Simulate, MatchesRepeatedSteps) {
  LcModel m = oracle::small_model();
  check_assumptions(m);
  const auto tr = simulate(m, vec({0.5}), {vec({-1}), vec({0.3}), vec({2})});
  ASSERT_EQ(tr.x.size(), 4u);
  ASSERT_EQ(tr.w.size(), 3u);
  VectorXd x = vec({0.5});
  const std::vector<double> us{-1, 0.3, 2};
  for (int k = 0; k < 3; ++k) {
    x = step(m, x, vec({us[k]})).x_plus;
    EXPECT_NEAR(tr.x[k + 1](0), x(0), 1e-12);
    EXPECT_NEAR(tr.x[k + 1](0), std::max(-(tr.x[k](0) + us[k] + 2), -1.0), 1e-9);
  }
}
