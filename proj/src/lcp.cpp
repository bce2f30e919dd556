#include "hyoc/lcp.hpp"

#include <algorithm>
#include <cmath>

#include "hyoc/qp.hpp"

namespace hyoc {

namespace {

double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

VectorXd lhs(const VectorXd& m, const VectorXd& q, const VectorXd& w) { return m * m.dot(w) + q; }

// Zero classification with the shared activity tolerance.
bool is_zero(double v) { return std::abs(v) <= kActivityTol; }

}  // namespace

void RankOneLcp::validate() const {
  require(m.size() == q.size(), ErrorCode::DimensionMismatch, "LCP m/q size");
  for (Eigen::Index i = 0; i < m.size(); ++i)
    require(std::abs(m(i)) > 1e-12, ErrorCode::InvalidArgument, "rank-one LCP requires nonzero m entries");
  if (assumption3)
    require(q.size() > 0 && q.minCoeff() < 0, ErrorCode::InvalidArgument, "assumption flag set but q >= 0");
}

bool is_lcp_solution(const RankOneLcp& lcp, const VectorXd& w) {
  if (w.size() != lcp.size()) return false;
  if (w.size() == 0) return true;
  const VectorXd s = lhs(lcp.m, lcp.q, w);
  return w.minCoeff() >= -kFeasTol && s.minCoeff() >= -kFeasTol && std::abs(w.dot(s)) <= kActivityTol;
}

std::optional<VectorXd> solve_lcp(const RankOneLcp& lcp) {
  lcp.validate();
  const auto n = lcp.size();
  if (n == 0) return VectorXd(0);
  if (lcp.q.minCoeff() >= 0) return VectorXd::Zero(n);
  auto qp = QuadraticProgram::with_cost(lcp.M(), lcp.q);
  qp.A_in = -MatrixXd::Identity(n, n);
  qp.b_in = VectorXd::Zero(n);
  const QpSolution sol = solve_qp(qp);
  if (sol.status != QpStatus::Optimal) return std::nullopt;
  VectorXd w = sol.v_star.cwiseMax(0.0);
  // Snap the support so that the complementarity residual is exact up to rounding.
  const VectorXd s = lhs(lcp.m, lcp.q, w);
  for (Eigen::Index i = 0; i < n; ++i)
    if (w(i) <= 1e-12 * std::max(1.0, w.maxCoeff()) && s(i) >= 0) w(i) = 0.0;
  return w;
}

LcpSolutionSet solution_set(const RankOneLcp& lcp, const VectorXd& w_bar) {
  if (!is_lcp_solution(lcp, w_bar)) throw Error(ErrorCode::NotASolution, "w_bar does not solve the LCP");
  LcpSolutionSet set;
  set.w_bar = w_bar;
  set.m = lcp.m;
  set.q = lcp.q;
  set.t = lcp.m.dot(w_bar);
  set.s = lhs(lcp.m, lcp.q, w_bar);
  for (Eigen::Index j = 0; j < w_bar.size(); ++j)
    if (is_zero(set.s(j))) set.free.push_back(static_cast<int>(j));
  return set;
}

bool LcpSolutionSet::contains(const VectorXd& w, double tol) const {
  if (w.size() != m.size()) return false;
  if (w.size() == 0) return true;
  return w.minCoeff() >= -tol && std::abs(q.dot(w - w_bar)) <= std::max(tol, 1e-9 * q.cwiseAbs().sum()) &&
         std::abs(m.dot(w - w_bar)) <= std::max(tol, 1e-9 * m.cwiseAbs().sum());
}

LcpIndexSets index_sets(const RankOneLcp& lcp, const VectorXd& w) {
  if (!is_lcp_solution(lcp, w)) throw Error(ErrorCode::NotASolution, "index_sets needs an LCP solution");
  const VectorXd s = lhs(lcp.m, lcp.q, w);
  LcpIndexSets out;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const int i = static_cast<int>(j);
    if (!is_zero(w(j)))
      out.alpha.push_back(i);
    else if (is_zero(s(j)))
      out.beta.push_back(i);
    else
      out.gamma.push_back(i);
  }
  return out;
}

VectorXd nondegenerate_solution(const LcpSolutionSet& set) {
  VectorXd w = set.w_bar;
  for (;;) {
    int i = -1;
    int j = -1;
    for (int k : set.free) {
      if (!is_zero(w(k))) {
        if (i < 0 || w(k) > w(i)) i = k;
      } else if (j < 0) {
        j = k;
      }
    }
    if (j < 0) return w;
    if (i < 0) throw Error(ErrorCode::DegenerateExhausted, "no positive coordinate to trade against");
    const double ratio = set.m(i) / set.m(j);
    const double di = -0.5 * w(i) * sgn(ratio);
    w(i) += di;
    w(j) = -ratio * di;
  }
}

bool is_singleton(const LcpSolutionSet& set) {
  // Feasible directions at w_bar: d_j = 0 off `free`, m'd = 0, d_j >= 0 where w_bar_j = 0.
  const auto n = set.m.size();
  if (n == 0) return true;
  std::vector<int> fixed;
  std::vector<int> lower;
  std::vector<char> is_free(static_cast<size_t>(n), 0);
  for (int k : set.free) is_free[static_cast<size_t>(k)] = 1;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!is_free[static_cast<size_t>(k)])
      fixed.push_back(static_cast<int>(k));
    else if (is_zero(set.w_bar(k)))
      lower.push_back(static_cast<int>(k));
  }
  MatrixXd E = MatrixXd::Zero(static_cast<Eigen::Index>(fixed.size()) + 1, n);
  for (size_t r = 0; r < fixed.size(); ++r) E(static_cast<Eigen::Index>(r), fixed[r]) = 1.0;
  E.row(E.rows() - 1) = set.m.transpose();
  MatrixXd K = MatrixXd::Zero(static_cast<Eigen::Index>(lower.size()), n);
  for (size_t r = 0; r < lower.size(); ++r) K(static_cast<Eigen::Index>(r), lower[r]) = -1.0;
  return !nonzero_cone_element(E, K).has_value();
}

std::vector<LcpFace> faces(const LcpSolutionSet& set) {
  const int nf = static_cast<int>(set.free.size());
  require(nf <= 12, ErrorCode::SizeLimit, "face enumeration limited to 12 free coordinates");
  const auto n = set.m.size();
  const double ts = is_zero(set.t) ? 0.0 : sgn(set.t);
  std::vector<LcpFace> out;
  for (unsigned mask = 0; mask < (1u << nf); ++mask) {
    IndexList same;
    IndexList opp;
    IndexList pos;
    IndexList neg;
    IndexList support;
    for (int b = 0; b < nf; ++b) {
      if (!(mask & (1u << b))) continue;
      const int k = set.free[static_cast<size_t>(b)];
      support.push_back(k);
      (set.m(k) > 0 ? pos : neg).push_back(k);
      if (ts != 0.0) (sgn(set.m(k)) == ts ? same : opp).push_back(k);
    }
    VectorXd w = VectorXd::Zero(n);
    LcpFace face;
    face.support = support;
    if (ts == 0.0) {
      if (support.empty()) {
        face.bounded = true;
      } else if (!pos.empty() && !neg.empty()) {
        for (int k : pos) w(k) = 1.0 / (static_cast<double>(pos.size()) * std::abs(set.m(k)));
        for (int k : neg) w(k) = 1.0 / (static_cast<double>(neg.size()) * std::abs(set.m(k)));
        face.bounded = false;
      } else {
        continue;
      }
    } else {
      if (same.empty()) continue;
      // Barycenter of the vertices (t / m_k) e_k, shifted along rays when opposite signs are present.
      const double n_opp = static_cast<double>(opp.size());
      for (int k : opp) w(k) = 1.0 / std::abs(set.m(k));
      for (int k : same)
        w(k) = (std::abs(set.t) + n_opp) / (static_cast<double>(same.size()) * std::abs(set.m(k)));
      face.bounded = opp.empty();
    }
    face.representative = w;
    out.push_back(std::move(face));
  }
  return out;
}

std::vector<VectorXd> vertices(const LcpSolutionSet& set) {
  const auto n = set.m.size();
  require(n <= 12, ErrorCode::SizeLimit, "vertex enumeration limited to n <= 12");
  std::vector<VectorXd> out;
  if (is_zero(set.t)) {
    out.push_back(VectorXd::Zero(n));
    return out;
  }
  for (int k : set.free) {
    if (sgn(set.m(k)) != sgn(set.t)) continue;
    VectorXd v = VectorXd::Zero(n);
    v(k) = set.t / set.m(k);
    out.push_back(v);
  }
  return out;
}

}  // namespace hyoc
