#include <gtest/gtest.h>

#include "hyoc/pwa_dc.hpp"
#include "hyoc/rng.hpp"
#include "oracles.hpp"

using namespace hyoc;
using oracle::vec;

namespace {

PwaDcSystem small_system() {
  PwaDcSystem s;
  s.n_x = 1;
  s.n_u = 1;
  s.psi.pieces = {oracle::piece(-1, -1, -2), oracle::piece(0, 0, -1)};
  s.phi.pieces = {oracle::piece(0, 0, 0)};
  s.domain = Polytope::box(2, -5, 5);
  return s;
}

}  // namespace

TEST(EvalMaxAffine, PlaneSystemAtOrigin) {
  const auto sys = oracle::plane_system();
  const auto psi = eval_max_affine(sys.psi, vec({0}), vec({0}));
  EXPECT_DOUBLE_EQ(psi.value(0), 3.0);
  EXPECT_EQ(psi.argmax[0], 0);
  const auto phi = eval_max_affine(sys.phi, vec({0}), vec({0}));
  EXPECT_DOUBLE_EQ(phi.value(0), 6.0);
}

TEST(EvalMaxAffine, SinglePieceIsAffine) {
  MaxAffine g;
  g.pieces = {{oracle::mat(2, 1, {1, 2}), oracle::mat(2, 1, {3, 4}), vec({5, 6})}};
  const auto r = eval_max_affine(g, vec({1}), vec({-1}));
  EXPECT_DOUBLE_EQ(r.value(0), 3.0);
  EXPECT_DOUBLE_EQ(r.value(1), 4.0);
  EXPECT_EQ(r.argmax, (IndexList{0, 0}));
}

TEST(EvalMaxAffine, TiesGoToLowestIndex) {
  MaxAffine g;
  g.pieces = {oracle::piece(1, 0, 0), oracle::piece(-1, 0, 0)};
  EXPECT_EQ(eval_max_affine(g, vec({0}), vec({0})).argmax[0], 0);
  EXPECT_EQ(eval_max_affine(g, vec({-1}), vec({0})).argmax[0], 1);
}

TEST(EvalDynamics, Examples) {
  EXPECT_DOUBLE_EQ(eval_dynamics(oracle::plane_system(), vec({0}), vec({0}))(0), -3.0);
  EXPECT_DOUBLE_EQ(eval_dynamics(small_system(), vec({0}), vec({-1}))(0), -1.0);
  PwaDcSystem same = oracle::plane_system();
  same.phi = same.psi;
  Rng rng(3, "test/same");
  for (int i = 0; i < 20; ++i)
    EXPECT_DOUBLE_EQ(eval_dynamics(same, rng.uniform_vector(1, -5, 5), rng.uniform_vector(1, -5, 5))(0), 0.0);
}

TEST(EvalDynamics, OutsideDomainThrows) {
  try {
    eval_dynamics(oracle::plane_system(), vec({6}), vec({0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
}

TEST(Simulate, Examples) {
  const auto sys = small_system();
  auto xs = simulate(sys, vec({0}), {vec({-1})});
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_DOUBLE_EQ(xs[1](0), -1.0);
  xs = simulate(sys, vec({0}), {vec({0})});
  EXPECT_DOUBLE_EQ(xs[1](0), -1.0);
  xs = simulate(sys, vec({0.5}), {});
  ASSERT_EQ(xs.size(), 1u);
  EXPECT_DOUBLE_EQ(xs[0](0), 0.5);
}

TEST(Simulate, NamesOffendingStep) {
  const auto sys = oracle::plane_system();
  try {
    // x1 = 3 - 6 = -3, then u = 9 leaves the box at step 1
    simulate(sys, vec({0}), {vec({0}), vec({9})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
}

TEST(Polytope, BasicQueries) {
  const auto box = Polytope::box(2, -1, 1);
  EXPECT_TRUE(box.contains(vec({1, -1})));
  EXPECT_FALSE(box.contains(vec({1.1, 0})));
  EXPECT_TRUE(box.is_bounded());
  EXPECT_FALSE(box.is_empty());
  EXPECT_FALSE(Polytope::whole_space(2).is_bounded());
  Polytope empty{oracle::mat(2, 1, {1, -1}), vec({-1, -1})};
  EXPECT_TRUE(empty.is_empty());
}

TEST(RandomDcSystem, DeterministicAndShaped) {
  const auto a = random_dc_system(1, 1, 2, 2, 7);
  const auto b = random_dc_system(1, 1, 2, 2, 7);
  ASSERT_EQ(a.psi.size(), b.psi.size());
  for (int j = 0; j < a.psi.size(); ++j) {
    EXPECT_EQ(a.psi.pieces[j].A, b.psi.pieces[j].A);
    EXPECT_EQ(a.psi.pieces[j].c, b.psi.pieces[j].c);
  }
  const auto c = random_dc_system(3, 1, 4, 4, 1);
  EXPECT_EQ(c.n_x, 3);
  EXPECT_EQ(c.n_u, 1);
  EXPECT_EQ(c.psi.out_dim(), 3);
  EXPECT_EQ(c.psi.size(), 4);
  EXPECT_EQ(c.phi.size(), 4);
  EXPECT_TRUE(c.domain.contains(VectorXd::Constant(4, 5.0)));
  EXPECT_FALSE(c.domain.contains(VectorXd::Constant(4, 5.1)));
  for (const auto& p : c.psi.pieces) {
    EXPECT_LE(p.A.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_LE(p.c.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(RandomDcSystem, ContinuousAcrossSegments) {
  const auto sys = random_dc_system(2, 1, 3, 3, 5);
  Rng rng(5, "test/continuity");
  for (int t = 0; t < 50; ++t) {
    const VectorXd p = rng.uniform_vector(3, -5, 5);
    const VectorXd d = rng.uniform_vector(3, -1, 1) * 1e-9;
    const VectorXd q = (p + d).cwiseMax(-5.0).cwiseMin(5.0);
    const VectorXd fp = eval_dynamics(sys, p.head(2), p.tail(1));
    const VectorXd fq = eval_dynamics(sys, q.head(2), q.tail(1));
    EXPECT_LE((fp - fq).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(MaxAffineProperty, ConvexAndEqualsBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto sys = random_dc_system(2, 2, 4, 3, seed);
    Rng rng(seed, "test/convexity");
    for (int t = 0; t < 50; ++t) {
      const VectorXd p = rng.uniform_vector(4, -5, 5);
      const VectorXd q = rng.uniform_vector(4, -5, 5);
      const VectorXd mid = (p + q) / 2;
      for (const MaxAffine* g : {&sys.psi, &sys.phi}) {
        const VectorXd gp = eval_max_affine(*g, p.head(2), p.tail(2)).value;
        const VectorXd gq = eval_max_affine(*g, q.head(2), q.tail(2)).value;
        const VectorXd gm = eval_max_affine(*g, mid.head(2), mid.tail(2)).value;
        for (int c = 0; c < 2; ++c) {
          EXPECT_LE(gm(c), (gp(c) + gq(c)) / 2 + 1e-9);
          EXPECT_NEAR(gp(c), oracle::brute_max(*g, p.head(2), p.tail(2), c), 1e-12);
        }
      }
    }
  }
}

TEST(SimulateProperty, PrefixComposition) {
  const auto sys = oracle::plane_system();
  Rng rng(9, "test/prefix");
  for (int t = 0; t < 20; ++t) {
    const int N = rng.uniform_int(1, 5);
    std::vector<VectorXd> us;
    for (int k = 0; k <= N; ++k) us.push_back(rng.uniform_vector(1, -1, 1));
    const VectorXd x0 = rng.uniform_vector(1, -2, 2);
    std::vector<VectorXd> head(us.begin(), us.end() - 1);
    std::vector<VectorXd> xs;
    try {
      xs = simulate(sys, x0, head);
    } catch (const Error&) {
      continue;
    }
    std::vector<VectorXd> full;
    try {
      full = simulate(sys, x0, us);
    } catch (const Error&) {
      continue;
    }
    const auto tail = simulate(sys, xs.back(), {us.back()});
    EXPECT_EQ(full.back(), tail.back());
    for (int k = 0; k <= N - 1; ++k) EXPECT_EQ(full[k], xs[k]);
  }
}

TEST(StrictlyBelow, ShiftedPieceIsBelow) {
  const auto sys = oracle::plane_system();
  AffinePiece under = sys.psi.pieces[0];
  under.c(0) -= 0.5;
  EXPECT_TRUE(strictly_below(sys.psi, under, sys.domain));
  under.c(0) += 0.5;
  EXPECT_FALSE(strictly_below(sys.psi, under, sys.domain));
}
