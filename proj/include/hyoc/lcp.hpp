#pragma once

#include <optional>
#include <vector>

#include "hyoc/types.hpp"

namespace hyoc {

/// 0 <= m m' w + q  _|_  w >= 0 with every |m_i| > 1e-12.
struct RankOneLcp {
  VectorXd m;
  VectorXd q;
  bool assumption3 = false;  ///< caller asserts some q_j < 0

  Eigen::Index size() const { return m.size(); }
  MatrixXd M() const { return m * m.transpose(); }
  void validate() const;
};

/// Returns a solution, or nullopt when none exists (the equivalent QP is unbounded below).
std::optional<VectorXd> solve_lcp(const RankOneLcp& lcp);

bool is_lcp_solution(const RankOneLcp& lcp, const VectorXd& w);

/// All solutions: {w >= 0 : q'(w - w_bar) = 0, m'(w - w_bar) = 0}.
///
/// Equivalently w_j = 0 wherever s_j = (M w_bar + q)_j > 0 and m'w = t := m'w_bar.
/// `free` lists the coordinates with s_j = 0 that may carry mass.
struct LcpSolutionSet {
  VectorXd w_bar;
  VectorXd m;
  VectorXd q;
  double t = 0.0;
  VectorXd s;
  IndexList free;

  bool contains(const VectorXd& w, double tol = kFeasTol) const;
};

LcpSolutionSet solution_set(const RankOneLcp& lcp, const VectorXd& w_bar);

struct LcpIndexSets {
  IndexList alpha;  ///< w_j > 0 = s_j
  IndexList beta;   ///< w_j = 0 = s_j
  IndexList gamma;  ///< w_j = 0 < s_j
};

LcpIndexSets index_sets(const RankOneLcp& lcp, const VectorXd& w);

/// Strictly complementary member of the set, reached by repeated two-index moves that
/// push one biactive coordinate into the support while keeping m'w and q'w fixed.
VectorXd nondegenerate_solution(const LcpSolutionSet& set);

bool is_singleton(const LcpSolutionSet& set);

/// A nonempty face, identified by the coordinates that are positive in its relative interior.
struct LcpFace {
  IndexList support;
  VectorXd representative;
  bool bounded = true;
};

/// Faces ordered by support bitmask (over `free`). Throws SizeLimit when |free| > 12.
std::vector<LcpFace> faces(const LcpSolutionSet& set);

/// Vertices (t / m_j) e_j, or the origin when t = 0. Throws SizeLimit when n > 12.
std::vector<VectorXd> vertices(const LcpSolutionSet& set);

}  // namespace hyoc
