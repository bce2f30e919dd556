#include "hyoc/lc_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "hyoc/qp.hpp"

namespace hyoc {

namespace {

double max_abs(const MatrixXd& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

void check_shape(const MatrixXd& M, Eigen::Index rows, Eigen::Index cols, const char* name) {
  require(M.rows() == rows && M.cols() == cols, ErrorCode::DimensionMismatch, std::string("LC model field ") + name);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

void LcModel::validate() const {
  const auto nx = A.rows();
  const auto nu = B_u.cols();
  const auto nw = E_w.rows();
  check_shape(A, nx, nx, "A");
  check_shape(B_u, nx, nu, "B_u");
  check_shape(B_w, nx, nw, "B_w");
  require(c.size() == nx, ErrorCode::DimensionMismatch, "LC model field c");
  check_shape(E_w, nw, nw, "E_w");
  check_shape(E_x, nw, nx, "E_x");
  check_shape(E_u, nw, nu, "E_u");
  require(e.size() == nw, ErrorCode::DimensionMismatch, "LC model field e");
  require(domain.H.rows() == domain.k.size() && (domain.H.rows() == 0 || domain.H.cols() == nx + nu),
          ErrorCode::DimensionMismatch, "LC model domain");
  if (aux) {
    const auto na = aux->F_a.cols();
    check_shape(aux->F_a, na, na, "F_a");
    check_shape(aux->B_a, nx, na, "B_a");
    check_shape(aux->E_a, nw, na, "E_a");
    check_shape(aux->F_x, na, nx, "F_x");
    check_shape(aux->F_u, na, nu, "F_u");
    check_shape(aux->F_w, na, nw, "F_w");
    require(aux->f.size() == na, ErrorCode::DimensionMismatch, "LC model field f");
  }
  for (const auto& b : blocks) {
    require(static_cast<Eigen::Index>(b.indices.size()) == b.m.size(), ErrorCode::DimensionMismatch, "block size");
    for (int i : b.indices) require(i >= 0 && i < nw, ErrorCode::DimensionMismatch, "block index out of range");
  }
}

LcModel eliminate_aux(const LcModel& model) {
  if (!model.aux) return model;
  const AuxStructure& ax = *model.aux;
  Eigen::PartialPivLU<MatrixXd> lu(ax.F_a);
  const MatrixXd K_x = -lu.solve(ax.F_x);
  const MatrixXd K_u = -lu.solve(ax.F_u);
  const MatrixXd K_w = -lu.solve(ax.F_w);
  const VectorXd k = -lu.solve(ax.f);
  LcModel out;
  out.A = model.A + ax.B_a * K_x;
  out.B_u = model.B_u + ax.B_a * K_u;
  out.B_w = model.B_w + ax.B_a * K_w;
  out.c = model.c + ax.B_a * k;
  out.E_w = model.E_w + ax.E_a * K_w;
  out.E_x = model.E_x + ax.E_a * K_x;
  out.E_u = model.E_u + ax.E_a * K_u;
  out.e = model.e + ax.E_a * k;
  out.blocks = model.blocks;
  out.domain = model.domain;
  return out;
}

VectorXd aux_values(const LcModel& model, const VectorXd& x, const VectorXd& u, const VectorXd& w) {
  if (!model.aux) return VectorXd(0);
  const AuxStructure& ax = *model.aux;
  return -ax.F_a.partialPivLu().solve(ax.F_x * x + ax.F_u * u + ax.F_w * w + ax.f);
}

BlockDetection detect_blocks(const LcModel& model) {
  const MatrixXd& E = model.E_w;
  const auto n = E.rows();
  const double tol = 1e-10 * std::max(1.0, max_abs(E));
  BlockDetection out;
  if (E.cols() != n) {
    out.reason = "E_w is not square";
    return out;
  }
  if (n > 0 && (E - E.transpose()).cwiseAbs().maxCoeff() > tol) {
    out.reason = "E_w is not symmetric";
    return out;
  }
  std::vector<int> comp(static_cast<size_t>(n), -1);
  int n_comp = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (comp[static_cast<size_t>(s)] >= 0) continue;
    std::vector<Eigen::Index> stack{s};
    comp[static_cast<size_t>(s)] = n_comp;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (comp[static_cast<size_t>(j)] < 0 && std::abs(E(i, j)) > tol) {
          comp[static_cast<size_t>(j)] = n_comp;
          stack.push_back(j);
        }
      }
    }
    ++n_comp;
  }
  for (int c = 0; c < n_comp; ++c) {
    LcBlock b;
    for (Eigen::Index i = 0; i < n; ++i)
      if (comp[static_cast<size_t>(i)] == c) b.indices.push_back(static_cast<int>(i));
    for (int i : b.indices) {
      if (E(i, i) < -tol) {
        out.reason = "negative diagonal entry at index " + std::to_string(i);
        return out;
      }
      if (E(i, i) <= tol) {
        out.reason = "zero m entry at index " + std::to_string(i);
        return out;
      }
    }
    const int r = b.indices.front();
    const double mr = std::sqrt(E(r, r));
    b.m.resize(static_cast<Eigen::Index>(b.indices.size()));
    for (size_t a = 0; a < b.indices.size(); ++a) b.m(static_cast<Eigen::Index>(a)) = E(r, b.indices[a]) / mr;
    for (size_t a = 0; a < b.indices.size(); ++a) {
      for (size_t d = 0; d < b.indices.size(); ++d) {
        const double want = b.m(static_cast<Eigen::Index>(a)) * b.m(static_cast<Eigen::Index>(d));
        if (std::abs(E(b.indices[a], b.indices[d]) - want) > tol) {
          out.reason = "block containing index " + std::to_string(r) + " has rank > 1";
          return out;
        }
      }
    }
    out.blocks.push_back(std::move(b));
  }
  out.ok = true;
  return out;
}

Assumption1Result check_assumption1(const LcModel& model_in) {
  const LcModel model = eliminate_aux(model_in);
  Assumption1Result out;
  const MatrixXd Z = null_basis(model.E_w, 1e-10);
  const double bound = 1e-9 * max_abs(model.B_w);
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    const VectorXd d = Z.col(j);
    if ((model.B_w * d).cwiseAbs().maxCoeff() > bound) {
      Eigen::Index imax = 0;
      d.cwiseAbs().maxCoeff(&imax);
      out.verdict = Verdict::Fails;
      out.direction = d / d(imax);
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (std::abs(out.direction(i)) > 1e-12) {
          if (out.direction(i) < 0) out.direction = -out.direction;
          break;
        }
      }
      return out;
    }
  }
  out.verdict = Verdict::Holds;
  return out;
}

Assumption3Result check_assumption3(const LcModel& model_in) {
  const LcModel model = eliminate_aux(model_in);
  Assumption3Result out;
  std::vector<LcBlock> blocks = model.blocks;
  if (blocks.empty() && model.n_w() > 0) {
    const BlockDetection det = detect_blocks(model);
    if (!det.ok) return out;
    blocks = det.blocks;
  }
  const int np = model.n_x() + model.n_u();
  const MatrixXd Hd = model.domain.H.rows() == 0 ? MatrixXd(0, np) : model.domain.H;
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    const auto& b = blocks[bi];
    const auto nb = static_cast<Eigen::Index>(b.indices.size());
    MatrixXd R(nb, np);
    VectorXd rr(nb);
    for (Eigen::Index r = 0; r < nb; ++r) {
      const int i = b.indices[static_cast<size_t>(r)];
      R.row(r) << -model.E_x.row(i), -model.E_u.row(i);
      rr(r) = -model.e(i) - 1e-9;
    }
    const LpFeasibility lp = lp_feasible(MatrixXd(0, np), VectorXd(0), vstack(R, Hd), vstack(rr, VectorXd(-model.domain.k)));
    if (lp.feasible) {
      out.verdict = Verdict::Fails;
      out.block = static_cast<int>(bi);
      out.witness = lp.point;
      return out;
    }
  }
  out.verdict = Verdict::Holds;
  return out;
}

AssumptionReport check_assumptions(LcModel& model) {
  AssumptionReport rep;
  const LcModel reduced = eliminate_aux(model);
  const BlockDetection det = detect_blocks(reduced);
  if (!det.ok) {
    rep.a2 = Verdict::Fails;
    rep.a2_reason = det.reason;
    rep.details.push_back("A2: " + det.reason);
    return rep;
  }
  rep.a2 = Verdict::Holds;
  model.blocks = det.blocks;
  rep.details.push_back("A2: " + std::to_string(det.blocks.size()) + " rank-one blocks");

  const Assumption1Result a1 = check_assumption1(model);
  if (a1.verdict == Verdict::Holds) {
    rep.a1 = Verdict::Holds;
    rep.details.push_back("A1: N(E_w) is contained in N(B_w)");
  } else {
    rep.a1 = Verdict::Unknown;
    rep.a1_direction = a1.direction;
    rep.details.push_back("A1: nullspace test failed; well-posedness not decided");
  }

  const Assumption3Result a3 = check_assumption3(model);
  rep.a3 = a3.verdict;
  rep.a3_witness = a3.witness;
  if (a3.verdict == Verdict::Holds)
    rep.details.push_back("A3: every block has a strictly negative row on the domain");
  else if (a3.verdict == Verdict::Fails)
    rep.details.push_back("A3: block " + std::to_string(a3.block) + " is nonnegative at the witness point");
  if (model.domain.H.rows() == 0 && a3.verdict == Verdict::Holds)
    rep.details.push_back("A3: checked without domain restriction");
  return rep;
}

RankOneLcp block_lcp(const LcModel& reduced, const LcBlock& block, const VectorXd& x, const VectorXd& u) {
  RankOneLcp lcp;
  lcp.m = block.m;
  lcp.q.resize(block.m.size());
  for (size_t r = 0; r < block.indices.size(); ++r) {
    const int i = block.indices[r];
    lcp.q(static_cast<Eigen::Index>(r)) = reduced.E_x.row(i).dot(x) + reduced.E_u.row(i).dot(u) + reduced.e(i);
  }
  return lcp;
}

StepResult step(const LcModel& model, const VectorXd& x, const VectorXd& u, bool check_domain) {
  require(x.size() == model.n_x() && u.size() == model.n_u(), ErrorCode::DimensionMismatch, "step input size");
  if (check_domain && !model.domain.contains(join(x, u)))
    throw Error(ErrorCode::OutOfDomain, "(x, u) outside the model domain");
  const LcModel reduced = eliminate_aux(model);
  std::vector<LcBlock> blocks = model.blocks;
  if (blocks.empty() && model.n_w() > 0) {
    const BlockDetection det = detect_blocks(reduced);
    require(det.ok, ErrorCode::InvalidArgument, "E_w has no rank-one block structure: " + det.reason);
    blocks = det.blocks;
  }
  StepResult out;
  out.w = VectorXd::Zero(model.n_w());
  for (const auto& b : blocks) {
    const auto sol = solve_lcp(block_lcp(reduced, b, x, u));
    if (!sol) throw Error(ErrorCode::LcpInfeasible, "block LCP has no solution");
    for (size_t r = 0; r < b.indices.size(); ++r) out.w(b.indices[r]) = (*sol)(static_cast<Eigen::Index>(r));
  }
  out.x_plus = reduced.A * x + reduced.B_u * u + reduced.B_w * out.w + reduced.c;
  out.a = aux_values(model, x, u, out.w);
  return out;
}

LcTrajectory simulate(const LcModel& model, const VectorXd& x0, const std::vector<VectorXd>& inputs,
                      bool check_domain) {
  LcTrajectory tr;
  tr.x.push_back(x0);
  for (size_t k = 0; k < inputs.size(); ++k) {
    StepResult s;
    try {
      s = step(model, tr.x.back(), inputs[k], check_domain);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::OutOfDomain)
        throw Error(ErrorCode::OutOfDomain, "step " + std::to_string(k) + " leaves the domain");
      throw;
    }
    tr.x.push_back(s.x_plus);
    tr.w.push_back(s.w);
    tr.a.push_back(s.a);
  }
  return tr;
}

}  // namespace hyoc
