#pragma once

#include <cstdint>
#include <vector>

#include "hyoc/types.hpp"

namespace hyoc {

/// One affine map (x, u) -> A x + B u + c.
struct AffinePiece {
  MatrixXd A;
  MatrixXd B;
  VectorXd c;

  VectorXd operator()(const VectorXd& x, const VectorXd& u) const { return A * x + B * u + c; }
};

/// Componentwise maximum of affine pieces; every output component is convex.
struct MaxAffine {
  std::vector<AffinePiece> pieces;

  Eigen::Index out_dim() const { return pieces.empty() ? 0 : pieces.front().c.size(); }
  Eigen::Index n_x() const { return pieces.empty() ? 0 : pieces.front().A.cols(); }
  Eigen::Index n_u() const { return pieces.empty() ? 0 : pieces.front().B.cols(); }
  int size() const { return static_cast<int>(pieces.size()); }

  void validate() const;
};

struct MaxAffineValue {
  VectorXd value;
  IndexList argmax;  ///< lowest piece index attaining the max, per component
};

MaxAffineValue eval_max_affine(const MaxAffine& g, const VectorXd& x, const VectorXd& u);

/// {p : H p <= k}
struct Polytope {
  MatrixXd H;
  VectorXd k;

  Eigen::Index dim() const { return H.cols(); }
  bool contains(const VectorXd& p, double tol = kFeasTol) const;
  bool is_empty() const;
  bool is_bounded() const;

  static Polytope box(const VectorXd& lo, const VectorXd& hi);
  static Polytope box(Eigen::Index dim, double lo, double hi);
  static Polytope whole_space(Eigen::Index dim);
};

/// x+ = psi(x, u) - phi(x, u) over a bounded polytope in (x, u).
struct PwaDcSystem {
  int n_x = 0;
  int n_u = 0;
  MaxAffine psi;
  MaxAffine phi;
  Polytope domain;

  bool in_domain(const VectorXd& x, const VectorXd& u, double tol = kFeasTol) const;
  void validate() const;
};

/// Stacks (x, u) into one point of the joint space.
VectorXd join(const VectorXd& x, const VectorXd& u);

VectorXd eval_dynamics(const PwaDcSystem& sys, const VectorXd& x, const VectorXd& u);

/// Returns x_0 .. x_N. Throws OutOfDomain naming the offending step.
std::vector<VectorXd> simulate(const PwaDcSystem& sys, const VectorXd& x0, const std::vector<VectorXd>& inputs);

/// True iff under(p) < max_j piece_j(p) componentwise on all of `domain`, with margin 1e-9.
/// Decided by one LP per component: {p in domain : under(p) >= piece_j(p) for all j} must be empty.
bool strictly_below(const MaxAffine& g, const AffinePiece& under, const Polytope& domain);

/// Random DC system with piece entries in [-1, 1] on the box [-5, 5]^(n_x + n_u).
PwaDcSystem random_dc_system(int n_x, int n_u, int pieces_y, int pieces_z, std::uint64_t seed);

}  // namespace hyoc
