#include "hyoc/mpcc_solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "hyoc/qp.hpp"
#include "hyoc/rng.hpp"

namespace hyoc {

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
  explicit Deadline(double seconds) : start_(Clock::now()), limit_(seconds) {}
  bool expired() const {
    return std::isfinite(limit_) && std::chrono::duration<double>(Clock::now() - start_).count() > limit_;
  }

 private:
  Clock::time_point start_;
  double limit_;
};

MatrixXd rows_with_cols(const MatrixXd& M, Eigen::Index cols) { return M.rows() == 0 ? MatrixXd(0, cols) : M; }

void fill_trajectory(const MpccProblem& p, SolveReport& rep) {
  rep.u.clear();
  rep.x.assign(1, p.x0);
  rep.w.clear();
  for (int k = 0; k < p.layout.N; ++k) {
    rep.u.push_back(p.u(rep.v_star, k));
    rep.x.push_back(p.x(rep.v_star, k + 1));
    rep.w.push_back(p.w(rep.v_star, k));
  }
}

struct RunResult {
  SolveStatus status = SolveStatus::Infeasible;
  VectorXd v;
  BranchAssignment assignment;
  std::optional<MpccMultipliers> cert;
  int flips = 0;
  int qp_solves = 0;
};

// Branch pivoting from a fixed assignment; `warm` must be feasible for that branch if given.
RunResult pivot(const MpccProblem& p, BranchAssignment a, std::optional<VectorXd> warm, int max_flips,
                const Deadline& deadline) {
  RunResult res;
  const auto n_eq = p.F_eq.rows();
  const auto n_in = p.F_in.rows();
  std::set<std::vector<char>> visited;
  auto key = [](const BranchAssignment& b) {
    std::vector<char> k(b.size());
    for (size_t i = 0; i < b.size(); ++i) k[i] = b[i] == Side::GActive;
    return k;
  };
  visited.insert(key(a));
  int last_flip = -1;
  IndexList active;
  for (;;) {
    if (deadline.expired()) {
      res.status = SolveStatus::TimedOut;
      return res;
    }
    QpWarmStart ws;
    ws.point = warm;
    ws.active_set = active;
    const QpSolution sol = solve_qp(branch_qp(p, a), ws);
    ++res.qp_solves;
    if (sol.status == QpStatus::Infeasible) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
    if (sol.status == QpStatus::Unbounded) {
      res.status = SolveStatus::Unbounded;
      return res;
    }
    res.v = sol.v_star;
    res.assignment = a;
    ActiveSets s;
    try {
      s = active_sets(p, sol.v_star);
    } catch (const Error&) {
      res.status = SolveStatus::IterationLimit;
      return res;
    }
    if (auto cert = certificate_lp(p, sol.v_star, CertRegime::S)) {
      res.status = SolveStatus::SStationary;
      res.cert = cert;
      return res;
    }
    if (res.flips >= max_flips || s.beta.empty()) {
      res.status = SolveStatus::IterationLimit;
      return res;
    }
    // Pinned-side multiplier of each biactive index, in MPCC sign convention.
    std::vector<std::pair<double, int>> cand;
    for (int i : s.beta) cand.emplace_back(-sol.lambda_eq(n_eq + i), i);
    const double tol = kActivityTol * (1.0 + sol.lambda_eq.cwiseAbs().maxCoeff());
    std::vector<int> order;
    for (const auto& [mult, i] : cand)
      if (mult < -tol) order.push_back(i);
    if (order.empty()) {
      std::stable_sort(cand.begin(), cand.end());
      for (const auto& c : cand) order.push_back(c.second);
    }
    int flip = -1;
    for (int i : order) {
      if (i == last_flip) continue;
      BranchAssignment b = a;
      b[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] == Side::GActive ? Side::HActive : Side::GActive;
      if (visited.count(key(b))) continue;
      flip = i;
      a = std::move(b);
      break;
    }
    if (flip < 0) {
      res.status = SolveStatus::IterationLimit;
      return res;
    }
    visited.insert(key(a));
    last_flip = flip;
    ++res.flips;
    warm = sol.v_star;
    active.clear();
    for (int r : sol.active_set)
      if (r < n_in) active.push_back(r);
  }
}

// Minimizes the total violation of F_in over the same complementarity structure.
MpccProblem elastic_problem(const MpccProblem& p) {
  MpccProblem e = p;
  const auto n = p.n_v();
  const auto m = p.F_in.rows();
  const auto ne = n + m;
  e.extra_vars = p.extra_vars + static_cast<int>(m);
  e.P = MatrixXd::Zero(ne, ne);
  e.r = VectorXd::Zero(ne);
  e.r.tail(m).setOnes();
  e.constant = 0.0;
  e.F_in = MatrixXd::Zero(2 * m, ne);
  e.F_in.topLeftCorner(m, n) = p.F_in;
  e.F_in.topRightCorner(m, m) = -MatrixXd::Identity(m, m);
  e.F_in.bottomRightCorner(m, m) = -MatrixXd::Identity(m, m);
  e.f_in = VectorXd::Zero(2 * m);
  e.f_in.head(m) = p.f_in;
  auto pad = [&](const MatrixXd& M) {
    MatrixXd out = MatrixXd::Zero(M.rows(), ne);
    out.leftCols(n) = M;
    return out;
  };
  e.F_eq = pad(p.F_eq);
  e.G = pad(p.G);
  e.H = pad(p.H);
  return e;
}

VectorXd u_box(const MpccProblem& p, bool upper) {
  const int nx = p.layout.n_x;
  const int nu = p.layout.n_u;
  VectorXd out = VectorXd::Constant(nu, upper ? 1.0 : -1.0);
  const Polytope& D = p.model.domain;
  if (D.H.rows() == 0) return out;
  for (int i = 0; i < nu; ++i) {
    auto qp = QuadraticProgram::with_cost(MatrixXd::Zero(nx + nu, nx + nu),
                                          (upper ? -1.0 : 1.0) * VectorXd::Unit(nx + nu, nx + i));
    qp.A_in = D.H;
    qp.b_in = -D.k;
    const QpSolution s = solve_qp(qp);
    if (s.status == QpStatus::Optimal) out(i) = s.v_star(nx + i);
  }
  return out;
}

std::vector<VectorXd> random_inputs(const MpccProblem& p, Rng& rng, const VectorXd& lo, const VectorXd& hi) {
  std::vector<VectorXd> us;
  for (int k = 0; k < p.layout.N; ++k) {
    VectorXd u(p.layout.n_u);
    for (int i = 0; i < p.layout.n_u; ++i) u(i) = rng.uniform(lo(i), hi(i));
    us.push_back(u);
  }
  return us;
}

bool in_feasible(const MpccProblem& p, const VectorXd& v) {
  return p.F_in.rows() == 0 || (p.F_in * v + p.f_in).maxCoeff() <= kFeasTol;
}

std::optional<VectorXd> try_rollout(const MpccProblem& p, const std::vector<VectorXd>& inputs) {
  try {
    return p.rollout(inputs);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Feasible starting point and branch, trying the given inputs, then random rollouts, then the elastic problem.
std::optional<std::pair<VectorXd, BranchAssignment>> find_start(const MpccProblem& p, const std::vector<VectorXd>& inputs,
                                                                Rng& rng, const Deadline& deadline, int& qp_solves) {
  const auto r0 = try_rollout(p, inputs);
  if (r0 && in_feasible(p, *r0)) return std::make_pair(*r0, assignment_from_point(p, *r0));
  const VectorXd lo = u_box(p, false);
  const VectorXd hi = u_box(p, true);
  for (int t = 0; t < 20; ++t) {
    const auto v = try_rollout(p, random_inputs(p, rng, lo, hi));
    if (v && in_feasible(p, *v)) return std::make_pair(*v, assignment_from_point(p, *v));
  }
  if (!r0) return std::nullopt;
  const VectorXd& v0 = *r0;
  const MpccProblem e = elastic_problem(p);
  VectorXd ve(e.n_v());
  ve << v0, (p.F_in * v0 + p.f_in).cwiseMax(0.0);
  RunResult r = pivot(e, assignment_from_point(p, v0), ve, 500, deadline);
  qp_solves += r.qp_solves;
  if (r.status != SolveStatus::SStationary || r.v.tail(e.extra_vars - p.extra_vars).sum() > kFeasTol)
    return std::nullopt;
  const VectorXd v = r.v.head(p.n_v());
  return std::make_pair(v, assignment_from_point(p, v));
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::SStationary: return "SStationary";
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::SizeLimit: return "SizeLimit";
    case SolveStatus::TimedOut: return "TimedOut";
  }
  return "?";
}

QuadraticProgram branch_qp(const MpccProblem& p, const BranchAssignment& a) {
  const auto n = p.n_v();
  const auto nc = p.n_comp();
  require(static_cast<int>(a.size()) == nc, ErrorCode::DimensionMismatch, "branch assignment size");
  auto qp = QuadraticProgram::with_cost(p.P, p.r, p.constant);
  qp.A_eq = MatrixXd(p.F_eq.rows() + nc, n);
  qp.b_eq = VectorXd(p.F_eq.rows() + nc);
  qp.A_eq.topRows(p.F_eq.rows()) = p.F_eq;
  qp.b_eq.head(p.F_eq.rows()) = p.f_eq;
  qp.A_in = MatrixXd(p.F_in.rows() + nc, n);
  qp.b_in = VectorXd(p.F_in.rows() + nc);
  qp.A_in.topRows(p.F_in.rows()) = rows_with_cols(p.F_in, n);
  qp.b_in.head(p.F_in.rows()) = p.f_in;
  for (int i = 0; i < nc; ++i) {
    const bool g_side = a[static_cast<size_t>(i)] == Side::GActive;
    qp.A_eq.row(p.F_eq.rows() + i) = g_side ? p.G.row(i) : p.H.row(i);
    qp.b_eq(p.F_eq.rows() + i) = g_side ? p.g(i) : p.h(i);
    qp.A_in.row(p.F_in.rows() + i) = g_side ? -p.H.row(i) : -p.G.row(i);
    qp.b_in(p.F_in.rows() + i) = g_side ? -p.h(i) : -p.g(i);
  }
  return qp;
}

BranchAssignment assignment_from_point(const MpccProblem& p, const VectorXd& v) {
  const VectorXd Gv = p.G * v + p.g;
  BranchAssignment a(static_cast<size_t>(p.n_comp()), Side::HActive);
  const VectorXd Hv = p.H * v + p.h;
  for (int i = 0; i < p.n_comp(); ++i)
    if (std::abs(Gv(i)) <= kActivityTol && Hv(i) > kActivityTol) a[static_cast<size_t>(i)] = Side::GActive;
  return a;
}

SolveReport solve_local(const MpccProblem& p, const LocalInit& init, const LocalOptions& opt) {
  const Deadline deadline(opt.time_limit_s);
  SolveReport best;
  Rng rng(opt.seed, "multistart");
  const int starts = std::max(1, opt.starts);
  std::optional<VectorXd> lo;
  std::optional<VectorXd> hi;

  for (int s = 0; s < starts; ++s) {
    if (deadline.expired()) {
      if (best.status != SolveStatus::SStationary) best.status = SolveStatus::TimedOut;
      break;
    }
    SolveReport rep;
    BranchAssignment a;
    std::optional<VectorXd> warm;
    if (s == 0 && init.assignment) {
      a = *init.assignment;
    } else if (s == 0 && init.point) {
      warm = *init.point;
      a = assignment_from_point(p, *init.point);
    } else {
      std::vector<VectorXd> inputs;
      if (s == 0) {
        inputs = init.inputs ? *init.inputs
                             : std::vector<VectorXd>(static_cast<size_t>(p.layout.N), VectorXd::Zero(p.layout.n_u));
      } else {
        if (!lo) {
          lo = u_box(p, false);
          hi = u_box(p, true);
        }
        inputs = random_inputs(p, rng, *lo, *hi);
      }
      auto start = find_start(p, inputs, rng, deadline, rep.qp_solves);
      if (!start) {
        if (best.status != SolveStatus::SStationary) {
          best.status = deadline.expired() ? SolveStatus::TimedOut : SolveStatus::Infeasible;
          best.qp_solves += rep.qp_solves;
        }
        continue;
      }
      warm = start->first;
      a = start->second;
    }
    if (p.n_comp() == 0) a.clear();
    RunResult r = pivot(p, a, warm, opt.max_flips, deadline);
    // An infeasible initial branch: retry from its single-index neighbours.
    if (r.status == SolveStatus::Infeasible && !warm) {
      for (size_t i = 0; i < a.size() && r.status == SolveStatus::Infeasible; ++i) {
        BranchAssignment b = a;
        b[i] = b[i] == Side::GActive ? Side::HActive : Side::GActive;
        RunResult rb = pivot(p, b, std::nullopt, opt.max_flips, deadline);
        rb.qp_solves += r.qp_solves;
        r = rb;
      }
    }
    rep.status = r.status;
    rep.iterations = r.flips;
    rep.qp_solves += r.qp_solves;
    rep.assignment = r.assignment;
    if (r.v.size() == p.n_v()) {
      rep.v_star = r.v;
      rep.objective = p.objective(r.v);
      fill_trajectory(p, rep);
    }
    if (r.status == SolveStatus::SStationary) {
      rep.certificate = r.cert;
      rep.s_stationary = true;
    }
    const bool better = rep.status == SolveStatus::SStationary &&
                        (best.status != SolveStatus::SStationary || rep.objective < best.objective);
    if (better || (s == 0 && best.status != SolveStatus::SStationary)) {
      const int qs = best.qp_solves;
      best = rep;
      best.qp_solves += (s == 0 ? 0 : qs);
    } else {
      best.qp_solves += rep.qp_solves;
    }
  }
  if (best.status == SolveStatus::SStationary) {
    best.global_certified = certificate_lp(p, best.v_star, CertRegime::Global).has_value();
    if (opt.check_mssosc) {
      try {
        best.mssosc = check_mssosc(p, best.v_star);
      } catch (const Error&) {
        best.mssosc.reset();
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Enumeration oracle
// ---------------------------------------------------------------------------

namespace {

struct StageChoice {
  IndexList psi;  // piece per component
  IndexList phi;
};

struct OracleContext {
  const PwaDcSystem& sys;
  const QuadraticStageCost& cost;
  const VectorXd& x0;
  int N;
  Polytope stage_set;  // domain and optional stage constraints stacked
  std::vector<StageChoice> choices;
  bool cost_bound;
  const Deadline& deadline;
  double max_sequences;

  double best = std::numeric_limits<double>::infinity();
  VectorXd best_z;
  std::vector<int> best_seq;
  std::vector<int> seq;
  int leaves = 0;
  int qp_solves = 0;
  bool timed_out = false;
  bool size_limited = false;
};

// Rows a.(x, u) + b <= 0 forcing piece j of g to attain the maximum of component c.
void validity_rows(const MaxAffine& g, int c, int j, std::vector<VectorXd>& A, std::vector<double>& b) {
  const auto& pj = g.pieces[static_cast<size_t>(j)];
  for (int l = 0; l < g.size(); ++l) {
    if (l == j) continue;
    const auto& pl = g.pieces[static_cast<size_t>(l)];
    VectorXd row(g.n_x() + g.n_u());
    row << (pl.A.row(c) - pj.A.row(c)).transpose(), (pl.B.row(c) - pj.B.row(c)).transpose();
    A.push_back(row);
    b.push_back(pl.c(c) - pj.c(c));
  }
}

// Prefix QP over z = (u_0 .. u_{d-1}, x_1 .. x_d) for the first d stage choices.
QuadraticProgram prefix_qp(const OracleContext& ctx, const std::vector<int>& seq) {
  const int d = static_cast<int>(seq.size());
  const int nx = ctx.sys.n_x;
  const int nu = ctx.sys.n_u;
  const int n = d * (nu + nx);
  auto ui = [&](int k) { return k * nu; };
  auto xi = [&](int k) { return d * nu + (k - 1) * nx; };
  MatrixXd P = MatrixXd::Zero(n, n);
  VectorXd r = VectorXd::Zero(n);
  double constant = 0.0;
  for (int k = 0; k < d; ++k) {
    const StageCost& st = ctx.cost.stages[static_cast<size_t>(k)];
    P.block(ui(k), ui(k), nu, nu) += st.R;
    r.segment(ui(k), nu) += st.r;
    constant += st.constant;
    if (k == 0) {
      constant += 0.5 * ctx.x0.dot(st.Q * ctx.x0) + st.q.dot(ctx.x0);
    } else {
      P.block(xi(k), xi(k), nx, nx) += st.Q;
      r.segment(xi(k), nx) += st.q;
    }
  }
  if (d == ctx.N) {
    P.block(xi(d), xi(d), nx, nx) += ctx.cost.Q_N;
    r.segment(xi(d), nx) += ctx.cost.q_N;
    constant += ctx.cost.c_N;
  }
  auto qp = QuadraticProgram::with_cost(P, r, constant);

  std::vector<VectorXd> Ain;
  std::vector<double> bin;
  MatrixXd Aeq = MatrixXd::Zero(d * nx, n);
  VectorXd beq = VectorXd::Zero(d * nx);
  for (int k = 0; k < d; ++k) {
    const StageChoice& ch = ctx.choices[static_cast<size_t>(seq[static_cast<size_t>(k)])];
    // Stage rows act on (x_k, u_k): map a joint-space row into z, folding x_0 into the constant.
    auto push_row = [&](const VectorXd& a, double b) {
      VectorXd row = VectorXd::Zero(n);
      row.segment(ui(k), nu) = a.tail(nu);
      if (k == 0)
        b += a.head(nx).dot(ctx.x0);
      else
        row.segment(xi(k), nx) = a.head(nx);
      Ain.push_back(row);
      bin.push_back(b);
    };
    for (Eigen::Index i = 0; i < ctx.stage_set.H.rows(); ++i)
      push_row(ctx.stage_set.H.row(i).transpose(), -ctx.stage_set.k(i));
    for (int c = 0; c < nx; ++c) {
      std::vector<VectorXd> A;
      std::vector<double> b;
      validity_rows(ctx.sys.psi, c, ch.psi[static_cast<size_t>(c)], A, b);
      validity_rows(ctx.sys.phi, c, ch.phi[static_cast<size_t>(c)], A, b);
      for (size_t i = 0; i < A.size(); ++i) push_row(A[i], b[i]);

      const auto& pp = ctx.sys.psi.pieces[static_cast<size_t>(ch.psi[static_cast<size_t>(c)])];
      const auto& pf = ctx.sys.phi.pieces[static_cast<size_t>(ch.phi[static_cast<size_t>(c)])];
      const int row = k * nx + c;
      // x_{k+1,c} - (psi_j - phi_i)_c(x_k, u_k) = 0
      Aeq(row, xi(k + 1) + c) = 1.0;
      Aeq.block(row, ui(k), 1, nu) = -(pp.B.row(c) - pf.B.row(c));
      beq(row) = -(pp.c(c) - pf.c(c));
      const VectorXd ax = (pp.A.row(c) - pf.A.row(c)).transpose();
      if (k == 0)
        beq(row) -= ax.dot(ctx.x0);
      else
        Aeq.block(row, xi(k), 1, nx) = -ax.transpose();
    }
  }
  qp.A_eq = Aeq;
  qp.b_eq = beq;
  qp.A_in = MatrixXd(static_cast<Eigen::Index>(Ain.size()), n);
  qp.b_in = VectorXd(static_cast<Eigen::Index>(Ain.size()));
  for (size_t i = 0; i < Ain.size(); ++i) {
    qp.A_in.row(static_cast<Eigen::Index>(i)) = Ain[i].transpose();
    qp.b_in(static_cast<Eigen::Index>(i)) = bin[i];
  }
  return qp;
}

void dfs(OracleContext& ctx) {
  if (ctx.timed_out || ctx.size_limited) return;
  if (ctx.deadline.expired()) {
    ctx.timed_out = true;
    return;
  }
  const int d = static_cast<int>(ctx.seq.size());
  for (int c = 0; c < static_cast<int>(ctx.choices.size()); ++c) {
    ctx.seq.push_back(c);
    const QpSolution sol = solve_qp(prefix_qp(ctx, ctx.seq));
    ++ctx.qp_solves;
    if (sol.status == QpStatus::Optimal) {
      if (d + 1 == ctx.N) {
        ++ctx.leaves;
        if (sol.objective < ctx.best) {
          ctx.best = sol.objective;
          ctx.best_z = sol.v_star;
          ctx.best_seq = ctx.seq;
        }
        if (ctx.leaves > ctx.max_sequences) ctx.size_limited = true;
      } else if (!(ctx.cost_bound && sol.objective >= ctx.best)) {
        dfs(ctx);
      }
    }
    ctx.seq.pop_back();
    if (ctx.timed_out || ctx.size_limited) return;
  }
}

}  // namespace

SolveReport solve_global_oracle(const PwaDcSystem& sys, const QuadraticStageCost& cost, const VectorXd& x0, int N,
                                const OracleOptions& opt) {
  sys.validate();
  require(N >= 0, ErrorCode::InvalidArgument, "horizon must be >= 0");
  require(cost.horizon() == N, ErrorCode::DimensionMismatch, "cost horizon differs from N");
  require(x0.size() == sys.n_x, ErrorCode::DimensionMismatch, "x0 dimension");
  cost.validate(sys.n_x, sys.n_u);
  SolveReport rep;
  if (N == 0) {
    rep.status = SolveStatus::Optimal;
    rep.x = {x0};
    rep.objective = cost.terminal(x0);
    return rep;
  }
  const double per_stage = static_cast<double>(sys.psi.size()) * static_cast<double>(sys.phi.size());
  if (std::pow(per_stage, N) > 1e6) {
    rep.status = SolveStatus::SizeLimit;
    return rep;
  }
  const Deadline deadline(opt.time_limit_s);
  OracleContext ctx{sys, cost, x0, N, sys.domain, {}, cost.nonnegative(), deadline, opt.max_sequences, std::numeric_limits<double>::infinity(), {}, {}, {}, 0, 0, false, false};
  if (opt.stage_constraints && opt.stage_constraints->H.rows() > 0) {
    ctx.stage_set.H = vstack(ctx.stage_set.H, opt.stage_constraints->H);
    ctx.stage_set.k = vstack(ctx.stage_set.k, opt.stage_constraints->k);
  }

  // Stage choices whose region meets the stage set, in lexicographic order.
  const int nx = sys.n_x;
  const int py = sys.psi.size();
  const int pz = sys.phi.size();
  std::vector<int> digits(static_cast<size_t>(2 * nx), 0);
  for (;;) {
    StageChoice ch{IndexList(digits.begin(), digits.begin() + nx), IndexList(digits.begin() + nx, digits.end())};
    std::vector<VectorXd> A;
    std::vector<double> b;
    for (int c = 0; c < nx; ++c) {
      validity_rows(sys.psi, c, ch.psi[static_cast<size_t>(c)], A, b);
      validity_rows(sys.phi, c, ch.phi[static_cast<size_t>(c)], A, b);
    }
    MatrixXd M(static_cast<Eigen::Index>(A.size()), nx + sys.n_u);
    VectorXd m(static_cast<Eigen::Index>(A.size()));
    for (size_t i = 0; i < A.size(); ++i) {
      M.row(static_cast<Eigen::Index>(i)) = A[i].transpose();
      m(static_cast<Eigen::Index>(i)) = b[i];
    }
    if (lp_feasible(MatrixXd(0, nx + sys.n_u), VectorXd(0), vstack(M, ctx.stage_set.H),
                    vstack(m, VectorXd(-ctx.stage_set.k)))
            .feasible)
      ctx.choices.push_back(ch);
    int pos = 2 * nx - 1;
    while (pos >= 0) {
      const int base = pos < nx ? py : pz;
      if (++digits[static_cast<size_t>(pos)] < base) break;
      digits[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  dfs(ctx);
  rep.iterations = ctx.leaves;
  rep.qp_solves = ctx.qp_solves;
  if (ctx.timed_out) {
    rep.status = SolveStatus::TimedOut;
    return rep;
  }
  if (ctx.size_limited) {
    rep.status = SolveStatus::SizeLimit;
    return rep;
  }
  if (!std::isfinite(ctx.best)) {
    rep.status = SolveStatus::Infeasible;
    return rep;
  }
  rep.status = SolveStatus::Optimal;
  rep.objective = ctx.best;
  rep.v_star = ctx.best_z;
  rep.x = {x0};
  for (int k = 0; k < N; ++k) {
    rep.u.push_back(ctx.best_z.segment(k * sys.n_u, sys.n_u));
    rep.x.push_back(ctx.best_z.segment(N * sys.n_u + k * nx, nx));
    const StageChoice& ch = ctx.choices[static_cast<size_t>(ctx.best_seq[static_cast<size_t>(k)])];
    std::vector<int> s(ch.psi.begin(), ch.psi.end());
    s.insert(s.end(), ch.phi.begin(), ch.phi.end());
    rep.sequence.push_back(s);
  }
  return rep;
}

}  // namespace hyoc
