#include "hyoc/mpcc.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hyoc/lcp.hpp"
#include "hyoc/qp.hpp"

namespace hyoc {

namespace {

constexpr double kPointTol = 1e-7;
constexpr double kResidualTol = 1e-7;

double max_abs(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

MatrixXd rows_of(const MatrixXd& M, const IndexList& idx) {
  MatrixXd out(static_cast<Eigen::Index>(idx.size()), M.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(idx[i]);
  return out;
}

VectorXd stationarity_residual(const MpccProblem& p, const VectorXd& v, const MpccMultipliers& m) {
  return p.gradient(v) + p.F_in.transpose() * m.eta + p.F_eq.transpose() * m.mu - p.G.transpose() * m.nu_G -
         p.H.transpose() * m.nu_H;
}

bool dims_match(const MpccProblem& p, const MpccMultipliers& m) {
  return m.eta.size() == p.F_in.rows() && m.mu.size() == p.F_eq.rows() && m.nu_G.size() == p.n_comp() &&
         m.nu_H.size() == p.n_comp();
}

}  // namespace

double QuadraticStageCost::evaluate(const std::vector<VectorXd>& xs, const std::vector<VectorXd>& us) const {
  require(static_cast<int>(us.size()) == horizon() && xs.size() == us.size() + 1, ErrorCode::DimensionMismatch,
          "cost evaluation horizon");
  double J = terminal(xs.back());
  for (size_t k = 0; k < us.size(); ++k) J += stages[k](xs[k], us[k]);
  return J;
}

namespace {

// inf over z of 1/2 z'Sz + s'z + c >= 0 ?
bool quadratic_nonnegative(const MatrixXd& S, const VectorXd& s, double c) {
  if (S.rows() == 0) return c >= 0;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(S);
  cod.setThreshold(1e-12);
  const VectorXd z = cod.solve(-s);
  if ((S * z + s).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, max_abs(s))) return false;
  return 0.5 * z.dot(S * z) + s.dot(z) + c >= -1e-12;
}

}  // namespace

bool QuadraticStageCost::nonnegative() const {
  for (const auto& st : stages) {
    const auto nx = st.Q.rows();
    const auto nu = st.R.rows();
    MatrixXd S = MatrixXd::Zero(nx + nu, nx + nu);
    S.topLeftCorner(nx, nx) = st.Q;
    S.bottomRightCorner(nu, nu) = st.R;
    VectorXd s(nx + nu);
    s << st.q, st.r;
    if (!quadratic_nonnegative(S, s, st.constant)) return false;
  }
  return quadratic_nonnegative(Q_N, q_N, c_N);
}

void QuadraticStageCost::validate(int n_x, int n_u) const {
  auto psd = [](const MatrixXd& M) {
    if (M.rows() == 0) return true;
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff())) return false;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(M, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -1e-9;
  };
  for (const auto& st : stages) {
    require(st.Q.rows() == n_x && st.Q.cols() == n_x && st.R.rows() == n_u && st.R.cols() == n_u &&
                st.q.size() == n_x && st.r.size() == n_u,
            ErrorCode::DimensionMismatch, "stage cost dimensions");
    require(psd(st.Q) && psd(st.R), ErrorCode::InvalidArgument, "stage cost must be convex");
  }
  require(Q_N.rows() == n_x && Q_N.cols() == n_x && q_N.size() == n_x, ErrorCode::DimensionMismatch,
          "terminal cost dimensions");
  require(psd(Q_N), ErrorCode::InvalidArgument, "terminal cost must be convex");
}

QuadraticStageCost QuadraticStageCost::uniform(int N, const MatrixXd& Q, const MatrixXd& R, const MatrixXd& Q_N) {
  QuadraticStageCost c;
  c.stages.assign(static_cast<size_t>(N), StageCost{Q, R, VectorXd::Zero(Q.rows()), VectorXd::Zero(R.rows()), 0.0});
  c.Q_N = Q_N;
  c.q_N = VectorXd::Zero(Q_N.rows());
  return c;
}

QuadraticStageCost QuadraticStageCost::benchmark(int n_x, int n_u, int N) {
  return uniform(N, MatrixXd::Identity(n_x, n_x), MatrixXd::Identity(n_u, n_u), MatrixXd::Identity(n_x, n_x));
}

VectorXd MpccProblem::pack(const std::vector<VectorXd>& us, const std::vector<VectorXd>& xs_1N,
                           const std::vector<VectorXd>& ws, const std::vector<VectorXd>& as) const {
  const int N = layout.N;
  require(static_cast<int>(us.size()) == N && static_cast<int>(xs_1N.size()) == N && static_cast<int>(ws.size()) == N,
          ErrorCode::DimensionMismatch, "pack: horizon mismatch");
  VectorXd v = VectorXd::Zero(layout.n_v());
  for (int k = 0; k < N; ++k) {
    v.segment(layout.u(k), layout.n_u) = us[static_cast<size_t>(k)];
    v.segment(layout.x(k + 1), layout.n_x) = xs_1N[static_cast<size_t>(k)];
    v.segment(layout.w(k), layout.n_w) = ws[static_cast<size_t>(k)];
    if (layout.n_a > 0) {
      const VectorXd xk = k == 0 ? x0 : xs_1N[static_cast<size_t>(k - 1)];
      v.segment(layout.a(k), layout.n_a) =
          as.empty() ? aux_values(model, xk, us[static_cast<size_t>(k)], ws[static_cast<size_t>(k)])
                     : as[static_cast<size_t>(k)];
    }
  }
  return v;
}

VectorXd MpccProblem::rollout(const std::vector<VectorXd>& inputs) const {
  LcModel m = model;
  m.blocks = reduced.blocks;
  const LcTrajectory tr = simulate(m, x0, inputs, false);
  return pack(inputs, std::vector<VectorXd>(tr.x.begin() + 1, tr.x.end()), tr.w, tr.a);
}

double MpccProblem::infeasibility(const VectorXd& v) const {
  double viol = 0.0;
  if (F_eq.rows() > 0) viol = std::max(viol, max_abs(F_eq * v + f_eq));
  if (F_in.rows() > 0) viol = std::max(viol, (F_in * v + f_in).maxCoeff());
  if (G.rows() > 0) {
    viol = std::max(viol, -(G * v + g).minCoeff());
    viol = std::max(viol, -(H * v + h).minCoeff());
  }
  return viol;
}

MpccProblem assemble(const LcModel& model, const QuadraticStageCost& cost, const VectorXd& x0, int N,
                     const std::optional<Polytope>& stage_constraints) {
  model.validate();
  require(N >= 1, ErrorCode::InvalidArgument, "horizon must be >= 1");
  require(cost.horizon() == N, ErrorCode::DimensionMismatch, "cost horizon differs from N");
  require(x0.size() == model.n_x(), ErrorCode::DimensionMismatch, "x0 dimension");
  cost.validate(model.n_x(), model.n_u());

  MpccProblem p;
  p.model = model;
  p.reduced = eliminate_aux(model);
  if (p.reduced.blocks.empty() && model.n_w() > 0) {
    const BlockDetection det = detect_blocks(p.reduced);
    require(det.ok, ErrorCode::InvalidArgument, "model has no rank-one block structure: " + det.reason);
    p.reduced.blocks = det.blocks;
  }
  p.x0 = x0;
  StageLayout& L = p.layout;
  L = {N, model.n_x(), model.n_u(), model.n_w(), model.n_a()};
  const int nv = L.n_v();
  const int nx = L.n_x;
  const int nu = L.n_u;
  const int nw = L.n_w;
  const int na = L.n_a;

  p.P = MatrixXd::Zero(nv, nv);
  p.r = VectorXd::Zero(nv);
  p.constant = cost.c_N;
  for (int k = 0; k < N; ++k) {
    const StageCost& st = cost.stages[static_cast<size_t>(k)];
    p.P.block(L.u(k), L.u(k), nu, nu) += st.R;
    p.r.segment(L.u(k), nu) += st.r;
    p.constant += st.constant;
    if (k == 0) {
      p.constant += 0.5 * x0.dot(st.Q * x0) + st.q.dot(x0);
    } else {
      p.P.block(L.x(k), L.x(k), nx, nx) += st.Q;
      p.r.segment(L.x(k), nx) += st.q;
    }
  }
  p.P.block(L.x(N), L.x(N), nx, nx) += cost.Q_N;
  p.r.segment(L.x(N), nx) += cost.q_N;

  const int rows_eq = nx + na;
  p.dynamics_rows_per_stage = rows_eq;
  p.F_eq = MatrixXd::Zero(N * rows_eq, nv);
  p.f_eq = VectorXd::Zero(N * rows_eq);
  p.G = MatrixXd::Zero(N * nw, nv);
  p.g = VectorXd::Zero(N * nw);
  p.H = MatrixXd::Zero(N * nw, nv);
  p.h = VectorXd::Zero(N * nw);
  for (int k = 0; k < N; ++k) {
    const int r0 = k * rows_eq;
    p.F_eq.block(r0, L.x(k + 1), nx, nx) = MatrixXd::Identity(nx, nx);
    p.F_eq.block(r0, L.u(k), nx, nu) = -model.B_u;
    p.F_eq.block(r0, L.w(k), nx, nw) = -model.B_w;
    p.f_eq.segment(r0, nx) = -model.c;
    if (k == 0)
      p.f_eq.segment(r0, nx) -= model.A * x0;
    else
      p.F_eq.block(r0, L.x(k), nx, nx) = -model.A;

    const int c0 = k * nw;
    p.G.block(c0, L.u(k), nw, nu) = model.E_u;
    p.G.block(c0, L.w(k), nw, nw) = model.E_w;
    p.g.segment(c0, nw) = model.e;
    if (k == 0)
      p.g.segment(c0, nw) += model.E_x * x0;
    else
      p.G.block(c0, L.x(k), nw, nx) = model.E_x;
    p.H.block(c0, L.w(k), nw, nw) = MatrixXd::Identity(nw, nw);

    if (model.aux) {
      const AuxStructure& ax = *model.aux;
      p.F_eq.block(r0, L.a(k), nx, na) = -ax.B_a;
      p.F_eq.block(r0 + nx, L.u(k), na, nu) = ax.F_u;
      p.F_eq.block(r0 + nx, L.w(k), na, nw) = ax.F_w;
      p.F_eq.block(r0 + nx, L.a(k), na, na) = ax.F_a;
      p.f_eq.segment(r0 + nx, na) = ax.f;
      if (k == 0)
        p.f_eq.segment(r0 + nx, na) += ax.F_x * x0;
      else
        p.F_eq.block(r0 + nx, L.x(k), na, nx) = ax.F_x;
      p.G.block(c0, L.a(k), nw, na) = ax.E_a;
    }
  }

  p.F_in = MatrixXd(0, nv);
  p.f_in = VectorXd(0);
  if (stage_constraints && stage_constraints->H.rows() > 0) {
    const Polytope& Gam = *stage_constraints;
    require(Gam.H.cols() == nx + nu, ErrorCode::DimensionMismatch, "stage constraint dimension");
    const auto nr = Gam.H.rows();
    std::vector<std::pair<VectorXd, double>> rows;
    for (int k = 0; k < N; ++k) {
      for (Eigen::Index i = 0; i < nr; ++i) {
        VectorXd row = VectorXd::Zero(nv);
        double f = -Gam.k(i);
        row.segment(L.u(k), nu) = Gam.H.row(i).tail(nu).transpose();
        if (k == 0)
          f += Gam.H.row(i).head(nx).dot(x0);
        else
          row.segment(L.x(k), nx) = Gam.H.row(i).head(nx).transpose();
        if (max_abs(row) == 0.0 && f <= kFeasTol) continue;
        rows.emplace_back(std::move(row), f);
      }
    }
    p.F_in.resize(static_cast<Eigen::Index>(rows.size()), nv);
    p.f_in.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      p.F_in.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
      p.f_in(static_cast<Eigen::Index>(i)) = rows[i].second;
    }
  }
  return p;
}

ActiveSets active_sets(const MpccProblem& p, const VectorXd& v) {
  require(v.size() == p.n_v(), ErrorCode::DimensionMismatch, "point dimension");
  const double viol = p.infeasibility(v);
  if (viol > kPointTol) throw Error(ErrorCode::InfeasiblePoint, "constraint violation " + std::to_string(viol));
  ActiveSets s;
  const VectorXd Gv = p.G * v + p.g;
  const VectorXd Hv = p.H * v + p.h;
  for (Eigen::Index i = 0; i < Gv.size(); ++i) {
    const bool gz = std::abs(Gv(i)) <= kActivityTol;
    const bool hz = std::abs(Hv(i)) <= kActivityTol;
    const int ii = static_cast<int>(i);
    if (gz && hz)
      s.beta.push_back(ii);
    else if (gz)
      s.alpha.push_back(ii);
    else if (hz)
      s.gamma.push_back(ii);
    else
      throw Error(ErrorCode::InfeasiblePoint,
                  "complementarity violated at index " + std::to_string(i) + " by " + std::to_string(Gv(i) * Hv(i)));
  }
  if (p.F_in.rows() > 0) {
    const VectorXd Fv = p.F_in * v + p.f_in;
    for (Eigen::Index i = 0; i < Fv.size(); ++i)
      if (std::abs(Fv(i)) <= kActivityTol) s.I_in.push_back(static_cast<int>(i));
  }
  return s;
}

std::vector<StageMultipliers> stagewise(const MpccProblem& p, const MpccMultipliers& m) {
  std::vector<StageMultipliers> out;
  const auto& L = p.layout;
  for (int k = 0; k < L.N; ++k) {
    out.push_back({m.mu.segment(k * p.dynamics_rows_per_stage, L.n_x), m.nu_G.segment(k * L.n_w, L.n_w),
                   m.nu_H.segment(k * L.n_w, L.n_w)});
  }
  return out;
}

std::optional<MpccMultipliers> certificate_lp(const MpccProblem& p, const VectorXd& v, CertRegime regime,
                                              const std::vector<BetaBranch>& branch) {
  const ActiveSets s = active_sets(p, v);
  require(regime != CertRegime::MBranch || branch.size() == s.beta.size(), ErrorCode::DimensionMismatch,
          "M-branch needs one choice per biactive index");
  IndexList g_idx = s.alpha;
  IndexList h_idx = s.gamma;
  IndexList g_nonneg;
  IndexList h_nonneg;
  for (size_t b = 0; b < s.beta.size(); ++b) {
    const int i = s.beta[b];
    const BetaBranch br = regime == CertRegime::MBranch ? branch[b] : BetaBranch::BothNonnegative;
    if (br != BetaBranch::GZero) g_idx.push_back(i);
    if (br != BetaBranch::HZero) h_idx.push_back(i);
    if (br == BetaBranch::BothNonnegative) {
      g_nonneg.push_back(i);
      h_nonneg.push_back(i);
    }
  }
  if (regime == CertRegime::Global) {
    g_nonneg = g_idx;
    h_nonneg = h_idx;
  }
  std::sort(g_idx.begin(), g_idx.end());
  std::sort(h_idx.begin(), h_idx.end());

  const auto n_eta = static_cast<Eigen::Index>(s.I_in.size());
  const auto n_mu = p.F_eq.rows();
  const auto n_g = static_cast<Eigen::Index>(g_idx.size());
  const auto n_h = static_cast<Eigen::Index>(h_idx.size());
  const auto nz = n_eta + n_mu + n_g + n_h;

  MatrixXd A_eq(p.n_v(), nz);
  A_eq << rows_of(p.F_in, s.I_in).transpose(), p.F_eq.transpose(), -rows_of(p.G, g_idx).transpose(),
      -rows_of(p.H, h_idx).transpose();
  const VectorXd grad = p.gradient(v);

  std::vector<Eigen::Index> nonneg;
  for (Eigen::Index i = 0; i < n_eta; ++i) nonneg.push_back(i);
  for (int i : g_nonneg)
    nonneg.push_back(n_eta + n_mu + (std::lower_bound(g_idx.begin(), g_idx.end(), i) - g_idx.begin()));
  for (int i : h_nonneg)
    nonneg.push_back(n_eta + n_mu + n_g + (std::lower_bound(h_idx.begin(), h_idx.end(), i) - h_idx.begin()));
  MatrixXd A_in = MatrixXd::Zero(static_cast<Eigen::Index>(nonneg.size()), nz);
  for (size_t r = 0; r < nonneg.size(); ++r) A_in(static_cast<Eigen::Index>(r), nonneg[r]) = -1.0;

  const LpFeasibility lp = lp_feasible(A_eq, grad, A_in, VectorXd::Zero(A_in.rows()));
  if (!lp.feasible) return std::nullopt;

  MpccMultipliers m;
  m.eta = VectorXd::Zero(p.F_in.rows());
  m.mu = lp.point.segment(n_eta, n_mu);
  m.nu_G = VectorXd::Zero(p.n_comp());
  m.nu_H = VectorXd::Zero(p.n_comp());
  for (Eigen::Index i = 0; i < n_eta; ++i) m.eta(s.I_in[static_cast<size_t>(i)]) = std::max(0.0, lp.point(i));
  for (Eigen::Index i = 0; i < n_g; ++i) m.nu_G(g_idx[static_cast<size_t>(i)]) = lp.point(n_eta + n_mu + i);
  for (Eigen::Index i = 0; i < n_h; ++i) m.nu_H(h_idx[static_cast<size_t>(i)]) = lp.point(n_eta + n_mu + n_g + i);
  for (int i : g_nonneg) m.nu_G(i) = std::max(0.0, m.nu_G(i));
  for (int i : h_nonneg) m.nu_H(i) = std::max(0.0, m.nu_H(i));
  if (max_abs(stationarity_residual(p, v, m)) > 1e-6 * (1.0 + max_abs(grad))) return std::nullopt;
  return m;
}

std::optional<MpccMultipliers> find_m_certificate(const MpccProblem& p, const VectorXd& v) {
  if (auto m = certificate_lp(p, v, CertRegime::S)) return m;
  const ActiveSets s = active_sets(p, v);
  const size_t nb = s.beta.size();
  require(nb <= 10, ErrorCode::SizeLimit, "M-stationarity enumeration limited to 10 biactive indices");
  std::vector<BetaBranch> br(nb, BetaBranch::BothNonnegative);
  long total = 1;
  for (size_t i = 0; i < nb; ++i) total *= 3;
  for (long code = 1; code < total; ++code) {
    long c = code;
    for (size_t i = 0; i < nb; ++i) {
      br[i] = static_cast<BetaBranch>(c % 3);
      c /= 3;
    }
    if (auto m = certificate_lp(p, v, CertRegime::MBranch, br)) return m;
  }
  return std::nullopt;
}

bool check_s_stationary(const MpccProblem& p, const VectorXd& v, const MpccMultipliers& m) {
  if (!dims_match(p, m)) return false;
  ActiveSets s;
  try {
    s = active_sets(p, v);
  } catch (const Error&) {
    return false;
  }
  if (max_abs(stationarity_residual(p, v, m)) > kResidualTol * (1.0 + max_abs(p.gradient(v)))) return false;
  std::vector<char> tight(static_cast<size_t>(p.F_in.rows()), 0);
  for (int i : s.I_in) tight[static_cast<size_t>(i)] = 1;
  for (Eigen::Index i = 0; i < m.eta.size(); ++i) {
    if (m.eta(i) < -kActivityTol) return false;
    if (!tight[static_cast<size_t>(i)] && std::abs(m.eta(i)) > kActivityTol) return false;
  }
  for (int i : s.alpha)
    if (std::abs(m.nu_H(i)) > kActivityTol) return false;
  for (int i : s.gamma)
    if (std::abs(m.nu_G(i)) > kActivityTol) return false;
  for (int i : s.beta)
    if (m.nu_G(i) < -kActivityTol || m.nu_H(i) < -kActivityTol) return false;
  return true;
}

bool check_classical_kkt(const MpccProblem& p, const VectorXd& v, const KktMultipliers& k) {
  if (k.eta.size() != p.F_in.rows() || k.mu.size() != p.F_eq.rows() || k.nu_G.size() != p.n_comp() ||
      k.nu_H.size() != p.n_comp())
    return false;
  if (v.size() != p.n_v() || p.infeasibility(v) > kPointTol) return false;
  const VectorXd Gv = p.G * v + p.g;
  const VectorXd Hv = p.H * v + p.h;
  if (Gv.size() > 0 && std::abs(Gv.dot(Hv)) > kActivityTol) return false;
  const VectorXd res = p.gradient(v) + p.F_in.transpose() * k.eta + p.F_eq.transpose() * k.mu -
                       p.G.transpose() * k.nu_G - p.H.transpose() * k.nu_H +
                       k.xi * (p.G.transpose() * Hv + p.H.transpose() * Gv);
  if (max_abs(res) > kResidualTol) return false;
  if (k.xi < -kActivityTol) return false;
  if (p.F_in.rows() > 0) {
    const VectorXd Fv = p.F_in * v + p.f_in;
    for (Eigen::Index i = 0; i < Fv.size(); ++i)
      if (k.eta(i) < -kActivityTol || std::abs(k.eta(i) * Fv(i)) > kActivityTol) return false;
  }
  for (Eigen::Index i = 0; i < Gv.size(); ++i) {
    if (k.nu_G(i) < -kActivityTol || std::abs(k.nu_G(i) * Gv(i)) > kActivityTol) return false;
    if (k.nu_H(i) < -kActivityTol || std::abs(k.nu_H(i) * Hv(i)) > kActivityTol) return false;
  }
  return true;
}

MpccMultipliers convert_multipliers(const MpccProblem& p, const VectorXd& v, const KktMultipliers& k) {
  MpccMultipliers m;
  m.eta = k.eta;
  m.mu = k.mu;
  m.nu_G = k.nu_G - k.xi * (p.H * v + p.h);
  m.nu_H = k.nu_H - k.xi * (p.G * v + p.g);
  return m;
}

KktMultipliers to_kkt_multipliers(const MpccProblem& p, const VectorXd& v, const MpccMultipliers& m) {
  const ActiveSets s = active_sets(p, v);
  const VectorXd Gv = p.G * v + p.g;
  const VectorXd Hv = p.H * v + p.h;
  double xi = 0.0;
  for (int i : s.alpha) xi = std::max(xi, -m.nu_G(i) / Hv(i));
  for (int i : s.gamma) xi = std::max(xi, -m.nu_H(i) / Gv(i));
  KktMultipliers k;
  k.eta = m.eta;
  k.mu = m.mu;
  k.xi = xi;
  k.nu_G = m.nu_G + xi * Hv;
  k.nu_H = m.nu_H + xi * Gv;
  return k;
}

bool check_global_sufficient(const MpccProblem& p, const VectorXd& v, const MpccMultipliers& m) {
  if (!check_s_stationary(p, v, m)) return false;
  return (m.nu_G.size() == 0 || m.nu_G.minCoeff() >= -kActivityTol) &&
         (m.nu_H.size() == 0 || m.nu_H.minCoeff() >= -kActivityTol);
}

bool check_mssosc(const MpccProblem& p, const VectorXd& v) {
  const ActiveSets s = active_sets(p, v);
  require(s.beta.size() <= 16, ErrorCode::SizeLimit, "M-SSOSC branch enumeration limited to 16 biactive indices");
  const MatrixXd E_base = vstack(vstack(p.F_eq, rows_of(p.G, s.alpha)), vstack(rows_of(p.H, s.gamma), p.P));
  const MatrixXd K_base = vstack(rows_of(p.F_in, s.I_in), MatrixXd(p.gradient(v).transpose()));
  const size_t nb = s.beta.size();
  for (unsigned mask = 0; mask < (1u << nb); ++mask) {
    IndexList g_zero;
    IndexList h_zero;
    for (size_t b = 0; b < nb; ++b) ((mask >> b) & 1u ? h_zero : g_zero).push_back(s.beta[b]);
    const MatrixXd E = vstack(E_base, vstack(rows_of(p.G, g_zero), rows_of(p.H, h_zero)));
    const MatrixXd K = vstack(K_base, vstack(MatrixXd(-rows_of(p.H, g_zero)), MatrixXd(-rows_of(p.G, h_zero))));
    if (nonzero_cone_element(E, K)) return false;
  }
  return true;
}

InputTrajectoryCheck check_input_trajectory(const MpccProblem& p, const VectorXd& v) {
  (void)active_sets(p, v);
  const auto& L = p.layout;
  InputTrajectoryCheck out;

  struct Unit {
    int stage;
    const LcBlock* block;
    std::vector<LcpFace> faces;
  };
  std::vector<Unit> units;
  bool all_singleton = true;
  for (int k = 0; k < L.N; ++k) {
    const VectorXd xk = p.x(v, k);
    const VectorXd uk = p.u(v, k);
    const VectorXd wk = p.w(v, k);
    for (const auto& b : p.reduced.blocks) {
      const RankOneLcp lcp = block_lcp(p.reduced, b, xk, uk);
      VectorXd wb(b.m.size());
      for (size_t r = 0; r < b.indices.size(); ++r) wb(static_cast<Eigen::Index>(r)) = wk(b.indices[r]);
      const LcpSolutionSet set = solution_set(lcp, wb);
      if (!is_singleton(set)) all_singleton = false;
      units.push_back({k, &b, faces(set)});
    }
  }

  if (all_singleton) {
    out.representatives_checked = 1;
    if (certificate_lp(p, v, CertRegime::S)) {
      out.locally_optimal = true;
      out.reason = "unique complementarity variables with an S-stationarity certificate";
    } else {
      out.witness = v;
      out.reason = "unique complementarity variables without an S-stationarity certificate";
    }
    return out;
  }
  if (certificate_lp(p, v, CertRegime::Global)) {
    out.locally_optimal = true;
    out.representatives_checked = 1;
    out.reason = "global sufficiency certificate";
    return out;
  }

  double total = 1.0;
  for (const auto& u : units) total *= static_cast<double>(u.faces.size());
  require(total <= 1e4, ErrorCode::SizeLimit, "more than 10^4 face combinations");

  std::vector<size_t> idx(units.size(), 0);
  for (;;) {
    std::vector<VectorXd> us;
    std::vector<VectorXd> xs;
    std::vector<VectorXd> ws;
    for (int k = 0; k < L.N; ++k) {
      us.push_back(p.u(v, k));
      xs.push_back(p.x(v, k + 1));
      ws.push_back(p.w(v, k));
    }
    for (size_t j = 0; j < units.size(); ++j) {
      const auto& u = units[j];
      const VectorXd& rep = u.faces[idx[j]].representative;
      for (size_t r = 0; r < u.block->indices.size(); ++r)
        ws[static_cast<size_t>(u.stage)](u.block->indices[r]) = rep(static_cast<Eigen::Index>(r));
    }
    const VectorXd vr = p.pack(us, xs, ws);
    ++out.representatives_checked;
    if (!certificate_lp(p, vr, CertRegime::S)) {
      out.witness = vr;
      out.reason = "complementarity variables without an S-stationarity certificate";
      return out;
    }
    size_t j = units.size();
    while (j > 0) {
      --j;
      if (++idx[j] < units[j].faces.size()) break;
      idx[j] = 0;
      if (j == 0) {
        out.locally_optimal = true;
        out.reason = "every face representative is S-stationary";
        return out;
      }
    }
    if (units.empty()) {
      out.locally_optimal = true;
      return out;
    }
  }
}

}  // namespace hyoc
