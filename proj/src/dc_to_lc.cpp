#include "hyoc/dc_to_lc.hpp"

#include <algorithm>
#include <cmath>

namespace hyoc {

namespace {

void check_weights(const PwaDcSystem& sys, const VectorXd& Q_y, const VectorXd& Q_z) {
  require(Q_y.size() == sys.n_x && Q_z.size() == sys.n_x, ErrorCode::DimensionMismatch, "Q_y/Q_z size");
  require(Q_y.minCoeff() >= 1e-6 && Q_z.minCoeff() >= 1e-6, ErrorCode::InvalidArgument,
          "Q_y/Q_z diagonals must be >= 1e-6");
}

struct Layout {
  int n_x;
  int py;
  int pz;
  int lambda(int comp, int j) const { return comp * py + j; }
  int theta(int comp, int j) const { return n_x * py + comp * pz + j; }
  int n_w() const { return n_x * (py + pz); }
};

}  // namespace

void verify_supports(const PwaDcSystem& sys, const SupportPair& supports) {
  if (!strictly_below(sys.psi, supports.psi_bar, sys.domain))
    throw Error(ErrorCode::SupportViolated, "psi_bar touches psi somewhere on the domain");
  if (!strictly_below(sys.phi, supports.phi_bar, sys.domain))
    throw Error(ErrorCode::SupportViolated, "phi_bar touches phi somewhere on the domain");
}

SupportPair default_supports(const PwaDcSystem& sys, double eta, double zeta) {
  sys.validate();
  SupportPair sp;
  const auto& p = sys.psi.pieces.front();
  const auto& f = sys.phi.pieces.front();
  sp.psi_bar = {p.A, p.B, p.c.array() - eta};
  sp.phi_bar = {f.A, f.B, f.c.array() - zeta};
  sp.eta = eta;
  sp.zeta = zeta;
  verify_supports(sys, sp);
  return sp;
}

InverseOptPair build_inverse_opt(const PwaDcSystem& sys, const SupportPair& supports, const VectorXd& Q_y,
                                 const VectorXd& Q_z, const VectorXd& x, const VectorXd& u) {
  check_weights(sys, Q_y, Q_z);
  auto make = [&](const MaxAffine& g, const AffinePiece& bar, const VectorXd& Q) {
    const VectorXd target = bar(x, u);
    auto qp = QuadraticProgram::with_cost(Q.asDiagonal(), -(Q.asDiagonal() * target),
                                          0.5 * target.dot(Q.asDiagonal() * target));
    const int n = sys.n_x;
    qp.A_in = MatrixXd::Zero(n * g.size(), n);
    qp.b_in = VectorXd::Zero(n * g.size());
    for (int j = 0; j < g.size(); ++j) {
      const VectorXd pj = g.pieces[static_cast<size_t>(j)](x, u);
      for (int i = 0; i < n; ++i) {
        qp.A_in(j * n + i, i) = -1.0;
        qp.b_in(j * n + i) = pj(i);
      }
    }
    return qp;
  };
  return {make(sys.psi, supports.psi_bar, Q_y), make(sys.phi, supports.phi_bar, Q_z)};
}

LcModel build_sparse(const PwaDcSystem& sys, const SupportPair& supports, const VectorXd& Q_y,
                     const VectorXd& Q_z) {
  sys.validate();
  check_weights(sys, Q_y, Q_z);
  verify_supports(sys, supports);
  const int nx = sys.n_x;
  const int nu = sys.n_u;
  const Layout L{nx, sys.psi.size(), sys.phi.size()};
  const int nw = L.n_w();
  const int na = 2 * nx;

  LcModel m;
  m.A = MatrixXd::Zero(nx, nx);
  m.B_u = MatrixXd::Zero(nx, nu);
  m.B_w = MatrixXd::Zero(nx, nw);
  m.c = VectorXd::Zero(nx);
  m.E_w = MatrixXd::Zero(nw, nw);
  m.E_x = MatrixXd::Zero(nw, nx);
  m.E_u = MatrixXd::Zero(nw, nu);
  m.e = VectorXd::Zero(nw);
  m.domain = sys.domain;

  AuxStructure ax;
  ax.B_a = MatrixXd::Zero(nx, na);
  ax.B_a.leftCols(nx) = MatrixXd::Identity(nx, nx);
  ax.B_a.rightCols(nx) = -MatrixXd::Identity(nx, nx);
  ax.E_a = MatrixXd::Zero(nw, na);
  ax.F_a = MatrixXd::Zero(na, na);
  ax.F_x = MatrixXd::Zero(na, nx);
  ax.F_u = MatrixXd::Zero(na, nu);
  ax.F_w = MatrixXd::Zero(na, nw);
  ax.f = VectorXd::Zero(na);

  for (int i = 0; i < nx; ++i) {
    // Q_y (y - psi_bar) - sum lambda = 0
    ax.F_a(i, i) = Q_y(i);
    ax.F_x.row(i) = -Q_y(i) * supports.psi_bar.A.row(i);
    ax.F_u.row(i) = -Q_y(i) * supports.psi_bar.B.row(i);
    ax.f(i) = -Q_y(i) * supports.psi_bar.c(i);
    for (int j = 0; j < L.py; ++j) ax.F_w(i, L.lambda(i, j)) = -1.0;
    // Q_z (z - phi_bar) - sum theta = 0
    ax.F_a(nx + i, nx + i) = Q_z(i);
    ax.F_x.row(nx + i) = -Q_z(i) * supports.phi_bar.A.row(i);
    ax.F_u.row(nx + i) = -Q_z(i) * supports.phi_bar.B.row(i);
    ax.f(nx + i) = -Q_z(i) * supports.phi_bar.c(i);
    for (int j = 0; j < L.pz; ++j) ax.F_w(nx + i, L.theta(i, j)) = -1.0;

    for (int j = 0; j < L.py; ++j) {
      const auto& pc = sys.psi.pieces[static_cast<size_t>(j)];
      const int r = L.lambda(i, j);
      ax.E_a(r, i) = 1.0;
      m.E_x.row(r) = -pc.A.row(i);
      m.E_u.row(r) = -pc.B.row(i);
      m.e(r) = -pc.c(i);
    }
    for (int j = 0; j < L.pz; ++j) {
      const auto& pc = sys.phi.pieces[static_cast<size_t>(j)];
      const int r = L.theta(i, j);
      ax.E_a(r, nx + i) = 1.0;
      m.E_x.row(r) = -pc.A.row(i);
      m.E_u.row(r) = -pc.B.row(i);
      m.e(r) = -pc.c(i);
    }
  }
  m.aux = ax;
  for (int i = 0; i < nx; ++i) {
    LcBlock by;
    LcBlock bz;
    for (int j = 0; j < L.py; ++j) by.indices.push_back(L.lambda(i, j));
    for (int j = 0; j < L.pz; ++j) bz.indices.push_back(L.theta(i, j));
    by.m = VectorXd::Constant(L.py, 1.0 / std::sqrt(Q_y(i)));
    bz.m = VectorXd::Constant(L.pz, 1.0 / std::sqrt(Q_z(i)));
    m.blocks.push_back(by);
    m.blocks.push_back(bz);
  }
  std::stable_sort(m.blocks.begin(), m.blocks.end(),
                   [](const LcBlock& a, const LcBlock& b) { return a.indices.front() < b.indices.front(); });
  return m;
}

LcModel build_compact(const PwaDcSystem& sys, const SupportPair& supports, const VectorXd& Q_y,
                      const VectorXd& Q_z) {
  sys.validate();
  check_weights(sys, Q_y, Q_z);
  verify_supports(sys, supports);
  const int nx = sys.n_x;
  const int nu = sys.n_u;
  const Layout L{nx, sys.psi.size(), sys.phi.size()};
  const int nw = L.n_w();

  LcModel m;
  m.A = supports.psi_bar.A - supports.phi_bar.A;
  m.B_u = supports.psi_bar.B - supports.phi_bar.B;
  m.c = supports.psi_bar.c - supports.phi_bar.c;
  m.B_w = MatrixXd::Zero(nx, nw);
  m.E_w = MatrixXd::Zero(nw, nw);
  m.E_x = MatrixXd::Zero(nw, nx);
  m.E_u = MatrixXd::Zero(nw, nu);
  m.e = VectorXd::Zero(nw);
  m.domain = sys.domain;

  for (int i = 0; i < nx; ++i) {
    const double iy = 1.0 / Q_y(i);
    const double iz = 1.0 / Q_z(i);
    for (int j = 0; j < L.py; ++j) {
      const auto& pc = sys.psi.pieces[static_cast<size_t>(j)];
      const int r = L.lambda(i, j);
      m.B_w(i, r) = iy;
      for (int l = 0; l < L.py; ++l) m.E_w(r, L.lambda(i, l)) = iy;
      m.E_x.row(r) = supports.psi_bar.A.row(i) - pc.A.row(i);
      m.E_u.row(r) = supports.psi_bar.B.row(i) - pc.B.row(i);
      m.e(r) = supports.psi_bar.c(i) - pc.c(i);
    }
    for (int j = 0; j < L.pz; ++j) {
      const auto& pc = sys.phi.pieces[static_cast<size_t>(j)];
      const int r = L.theta(i, j);
      m.B_w(i, r) = -iz;
      for (int l = 0; l < L.pz; ++l) m.E_w(r, L.theta(i, l)) = iz;
      m.E_x.row(r) = supports.phi_bar.A.row(i) - pc.A.row(i);
      m.E_u.row(r) = supports.phi_bar.B.row(i) - pc.B.row(i);
      m.e(r) = supports.phi_bar.c(i) - pc.c(i);
    }
  }
  for (int i = 0; i < nx; ++i) {
    LcBlock by;
    for (int j = 0; j < L.py; ++j) by.indices.push_back(L.lambda(i, j));
    by.m = VectorXd::Constant(L.py, 1.0 / std::sqrt(Q_y(i)));
    m.blocks.push_back(by);
  }
  for (int i = 0; i < nx; ++i) {
    LcBlock bz;
    for (int j = 0; j < L.pz; ++j) bz.indices.push_back(L.theta(i, j));
    bz.m = VectorXd::Constant(L.pz, 1.0 / std::sqrt(Q_z(i)));
    m.blocks.push_back(bz);
  }
  return m;
}

}  // namespace hyoc
