#include "hyoc/pwa_dc.hpp"

#include <string>

#include "hyoc/qp.hpp"
#include "hyoc/rng.hpp"

namespace hyoc {

void MaxAffine::validate() const {
  require(!pieces.empty(), ErrorCode::InvalidArgument, "max-affine function needs at least one piece");
  const auto n = out_dim();
  const auto nx = n_x();
  const auto nu = n_u();
  for (const auto& p : pieces) {
    require(p.c.size() == n && p.A.rows() == n && p.B.rows() == n && p.A.cols() == nx && p.B.cols() == nu,
            ErrorCode::DimensionMismatch, "inconsistent max-affine piece dimensions");
  }
}

MaxAffineValue eval_max_affine(const MaxAffine& g, const VectorXd& x, const VectorXd& u) {
  require(x.size() == g.n_x() && u.size() == g.n_u(), ErrorCode::DimensionMismatch, "eval_max_affine input size");
  MaxAffineValue out;
  out.value = g.pieces.front()(x, u);
  out.argmax.assign(static_cast<size_t>(g.out_dim()), 0);
  for (int j = 1; j < g.size(); ++j) {
    const VectorXd v = g.pieces[static_cast<size_t>(j)](x, u);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) > out.value(i)) {
        out.value(i) = v(i);
        out.argmax[static_cast<size_t>(i)] = j;
      }
    }
  }
  return out;
}

bool Polytope::contains(const VectorXd& p, double tol) const {
  if (H.rows() == 0) return true;
  require(p.size() == H.cols(), ErrorCode::DimensionMismatch, "polytope membership dimension");
  return (H * p - k).maxCoeff() <= tol;
}

bool Polytope::is_empty() const {
  if (H.rows() == 0) return false;
  return !lp_feasible(MatrixXd(0, H.cols()), VectorXd(0), H, -k).feasible;
}

bool Polytope::is_bounded() const {
  const auto n = H.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      auto qp = QuadraticProgram::with_cost(MatrixXd::Zero(n, n), s * VectorXd::Unit(n, i));
      qp.A_in = H;
      qp.b_in = -k;
      if (solve_qp(qp).status == QpStatus::Unbounded) return false;
    }
  }
  return true;
}

Polytope Polytope::box(const VectorXd& lo, const VectorXd& hi) {
  const auto n = lo.size();
  Polytope P;
  P.H.resize(2 * n, n);
  P.H << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
  P.k.resize(2 * n);
  P.k << hi, -lo;
  return P;
}

Polytope Polytope::box(Eigen::Index dim, double lo, double hi) {
  return box(VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi));
}

Polytope Polytope::whole_space(Eigen::Index dim) { return Polytope{MatrixXd(0, dim), VectorXd(0)}; }

VectorXd join(const VectorXd& x, const VectorXd& u) {
  VectorXd p(x.size() + u.size());
  p << x, u;
  return p;
}

bool PwaDcSystem::in_domain(const VectorXd& x, const VectorXd& u, double tol) const {
  return domain.contains(join(x, u), tol);
}

void PwaDcSystem::validate() const {
  psi.validate();
  phi.validate();
  require(psi.out_dim() == n_x && phi.out_dim() == n_x, ErrorCode::DimensionMismatch, "psi/phi output must be n_x");
  require(psi.n_x() == n_x && phi.n_x() == n_x && psi.n_u() == n_u && phi.n_u() == n_u,
          ErrorCode::DimensionMismatch, "psi/phi input dimensions");
  require(domain.H.rows() == domain.k.size() && (domain.H.rows() == 0 || domain.H.cols() == n_x + n_u),
          ErrorCode::DimensionMismatch, "domain dimensions");
}

VectorXd eval_dynamics(const PwaDcSystem& sys, const VectorXd& x, const VectorXd& u) {
  if (!sys.in_domain(x, u)) throw Error(ErrorCode::OutOfDomain, "(x, u) outside the system domain");
  return eval_max_affine(sys.psi, x, u).value - eval_max_affine(sys.phi, x, u).value;
}

std::vector<VectorXd> simulate(const PwaDcSystem& sys, const VectorXd& x0, const std::vector<VectorXd>& inputs) {
  std::vector<VectorXd> xs{x0};
  xs.reserve(inputs.size() + 1);
  for (size_t k = 0; k < inputs.size(); ++k) {
    if (!sys.in_domain(xs.back(), inputs[k]))
      throw Error(ErrorCode::OutOfDomain, "step " + std::to_string(k) + " leaves the domain");
    xs.push_back(eval_dynamics(sys, xs.back(), inputs[k]));
  }
  return xs;
}

bool strictly_below(const MaxAffine& g, const AffinePiece& under, const Polytope& domain) {
  const auto nx = g.n_x();
  const auto nu = g.n_u();
  const auto np = nx + nu;
  for (Eigen::Index i = 0; i < g.out_dim(); ++i) {
    // under_i(p) - piece_j,i(p) >= -1e-9  <=>  (piece_j - under)_i . p + (c_j - c_under)_i - 1e-9 <= 0
    MatrixXd A(g.size(), np);
    VectorXd b(g.size());
    for (int j = 0; j < g.size(); ++j) {
      const auto& pc = g.pieces[static_cast<size_t>(j)];
      A.row(j) << pc.A.row(i) - under.A.row(i), pc.B.row(i) - under.B.row(i);
      b(j) = pc.c(i) - under.c(i) - 1e-9;
    }
    const MatrixXd H = domain.H.rows() == 0 ? MatrixXd(0, np) : domain.H;
    if (lp_feasible(MatrixXd(0, np), VectorXd(0), vstack(A, H), vstack(b, VectorXd(-domain.k))).feasible)
      return false;
  }
  return true;
}

namespace {

MaxAffine random_max_affine(Rng& rng, int n, int n_x, int n_u, int pieces) {
  MaxAffine g;
  for (int j = 0; j < pieces; ++j) {
    g.pieces.push_back({rng.uniform_matrix(n, n_x, -1, 1), rng.uniform_matrix(n, n_u, -1, 1),
                        rng.uniform_vector(n, -1, 1)});
  }
  return g;
}

AffinePiece shifted(const AffinePiece& p, double delta) { return {p.A, p.B, p.c.array() - delta}; }

// Every piece attains the strict maximum of its component somewhere in the domain.
bool all_pieces_active(const MaxAffine& g, const Polytope& domain) {
  const auto np = g.n_x() + g.n_u();
  for (Eigen::Index i = 0; i < g.out_dim(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      MatrixXd A(g.size() - 1, np);
      VectorXd b(g.size() - 1);
      int r = 0;
      const auto& pj = g.pieces[static_cast<size_t>(j)];
      for (int l = 0; l < g.size(); ++l) {
        if (l == j) continue;
        const auto& pl = g.pieces[static_cast<size_t>(l)];
        A.row(r) << pl.A.row(i) - pj.A.row(i), pl.B.row(i) - pj.B.row(i);
        b(r) = pl.c(i) - pj.c(i) + 1e-3;
        ++r;
      }
      if (!lp_feasible(MatrixXd(0, np), VectorXd(0), vstack(A, domain.H), vstack(b, VectorXd(-domain.k))).feasible)
        return false;
    }
  }
  return true;
}

}  // namespace

PwaDcSystem random_dc_system(int n_x, int n_u, int pieces_y, int pieces_z, std::uint64_t seed) {
  require(n_x >= 1 && n_u >= 1 && pieces_y >= 1 && pieces_z >= 1, ErrorCode::InvalidArgument,
          "random_dc_system dimensions must be >= 1");
  Rng rng(seed, "generator");
  for (int attempt = 0; attempt < 100; ++attempt) {
    PwaDcSystem sys;
    sys.n_x = n_x;
    sys.n_u = n_u;
    sys.psi = random_max_affine(rng, n_x, n_x, n_u, pieces_y);
    sys.phi = random_max_affine(rng, n_x, n_x, n_u, pieces_z);
    sys.domain = Polytope::box(n_x + n_u, -5.0, 5.0);
    if (!strictly_below(sys.psi, shifted(sys.psi.pieces.front(), 0.5), sys.domain)) continue;
    if (!strictly_below(sys.phi, shifted(sys.phi.pieces.front(), 0.5), sys.domain)) continue;
    if (!all_pieces_active(sys.psi, sys.domain) || !all_pieces_active(sys.phi, sys.domain)) continue;
    return sys;
  }
  throw Error(ErrorCode::GenerationFailed, "no admissible system after 100 redraws");
}

}  // namespace hyoc
