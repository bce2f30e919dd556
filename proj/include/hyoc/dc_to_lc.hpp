#pragma once

#include "hyoc/lc_model.hpp"
#include "hyoc/pwa_dc.hpp"
#include "hyoc/qp.hpp"

namespace hyoc {

/// Affine minorants psi_bar < psi and phi_bar < phi on the domain.
struct SupportPair {
  AffinePiece psi_bar;
  AffinePiece phi_bar;
  double eta = 0.0;
  double zeta = 0.0;
};

/// Throws SupportViolated unless both minorants are strictly below on the whole domain.
void verify_supports(const PwaDcSystem& sys, const SupportPair& supports);

/// psi_bar = first psi piece - eta, phi_bar = first phi piece - zeta.
SupportPair default_supports(const PwaDcSystem& sys, double eta = 0.5, double zeta = 0.5);

/// The two projection QPs at a fixed (x, u):
///   y = argmin 1/2 (y - psi_bar)' Q_y (y - psi_bar)  s.t.  y >= psi_j(x, u) for all j
/// and the analogous one for z and phi; their minimizers are psi(x, u) and phi(x, u).
struct InverseOptPair {
  QuadraticProgram psi_qp;
  QuadraticProgram phi_qp;
};

InverseOptPair build_inverse_opt(const PwaDcSystem& sys, const SupportPair& supports, const VectorXd& Q_y,
                                 const VectorXd& Q_z, const VectorXd& x, const VectorXd& u);

/// KKT system of both QPs with explicit a = (y, z):
///   x+ = y - z,  Q_y (y - psi_bar) = sum_j lambda_j,  Q_z (z - phi_bar) = sum_j theta_j,
///   0 <= y - psi_j  _|_  lambda_j >= 0,   0 <= z - phi_j  _|_  theta_j >= 0.
/// w is ordered [lambda for state 0 (all psi pieces), ..., lambda for state n_x-1, theta likewise].
LcModel build_sparse(const PwaDcSystem& sys, const SupportPair& supports, const VectorXd& Q_y, const VectorXd& Q_z);

/// The sparse model with y and z eliminated; one rank-one block per state component and function.
LcModel build_compact(const PwaDcSystem& sys, const SupportPair& supports, const VectorXd& Q_y,
                      const VectorXd& Q_z);

}  // namespace hyoc
