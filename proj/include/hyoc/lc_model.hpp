#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyoc/lcp.hpp"
#include "hyoc/pwa_dc.hpp"
#include "hyoc/types.hpp"

namespace hyoc {

/// Rank-one diagonal block of E_w: E_w restricted to `indices` equals m m'.
struct LcBlock {
  IndexList indices;
  VectorXd m;
};

/// Auxiliary variables a determined by the square, invertible equality
///   F_x x + F_u u + F_w w + F_a a + f = 0,
/// entering the transition through B_a a and the complementarity rows through E_a a.
struct AuxStructure {
  MatrixXd B_a;
  MatrixXd E_a;
  MatrixXd F_x;
  MatrixXd F_u;
  MatrixXd F_w;
  MatrixXd F_a;
  VectorXd f;
};

/// x+ = A x + B_u u + B_w w + c,  0 <= E_w w + E_x x + E_u u + e  _|_  w >= 0.
struct LcModel {
  MatrixXd A;
  MatrixXd B_u;
  MatrixXd B_w;
  VectorXd c;
  MatrixXd E_w;
  MatrixXd E_x;
  MatrixXd E_u;
  VectorXd e;
  std::vector<LcBlock> blocks;
  Polytope domain;
  std::optional<AuxStructure> aux;

  int n_x() const { return static_cast<int>(A.rows()); }
  int n_u() const { return static_cast<int>(B_u.cols()); }
  int n_w() const { return static_cast<int>(E_w.rows()); }
  int n_a() const { return aux ? static_cast<int>(aux->F_a.cols()) : 0; }

  void validate() const;
};

/// Substitutes a = -F_a^{-1}(F_x x + F_u u + F_w w + f); returns the model unchanged when it has no aux part.
LcModel eliminate_aux(const LcModel& model);

/// a for a given (x, u, w); empty when the model has no aux part.
VectorXd aux_values(const LcModel& model, const VectorXd& x, const VectorXd& u, const VectorXd& w);

struct BlockDetection {
  bool ok = false;
  std::vector<LcBlock> blocks;
  std::string reason;
};

/// Permutation-only search for a rank-one block-diagonal structure of E_w.
BlockDetection detect_blocks(const LcModel& model);

enum class Verdict { Holds, Fails, Unknown };

const char* to_string(Verdict v);

struct Assumption1Result {
  Verdict verdict = Verdict::Unknown;
  VectorXd direction;  ///< d in N(E_w) with B_w d != 0 when Fails
};

/// N(E_w) subset of N(B_w).
Assumption1Result check_assumption1(const LcModel& model);

struct Assumption3Result {
  Verdict verdict = Verdict::Unknown;
  int block = -1;
  VectorXd witness;  ///< (x, u) where every row of `block` is nonnegative
};

/// Every block keeps at least one strictly negative row on the whole (bounded) domain.
Assumption3Result check_assumption3(const LcModel& model);

struct AssumptionReport {
  Verdict a1 = Verdict::Unknown;
  Verdict a2 = Verdict::Unknown;
  Verdict a3 = Verdict::Unknown;
  VectorXd a1_direction;
  std::string a2_reason;
  VectorXd a3_witness;
  std::vector<std::string> details;

  bool all_hold() const { return a1 == Verdict::Holds && a2 == Verdict::Holds && a3 == Verdict::Holds; }
};

/// Runs all three checks on the aux-free form; populates `model.blocks` when A2 holds.
/// A failed nullspace test reports A1 as Unknown, since that test is only sufficient.
AssumptionReport check_assumptions(LcModel& model);

/// One block LCP at (x, u).
RankOneLcp block_lcp(const LcModel& reduced, const LcBlock& block, const VectorXd& x, const VectorXd& u);

struct StepResult {
  VectorXd x_plus;
  VectorXd w;
  VectorXd a;
};

/// Solves each block LCP and applies the transition. Blocks are detected when absent.
StepResult step(const LcModel& model, const VectorXd& x, const VectorXd& u, bool check_domain = true);

/// x_0 .. x_N together with the selected w_k.
struct LcTrajectory {
  std::vector<VectorXd> x;
  std::vector<VectorXd> w;
  std::vector<VectorXd> a;
};

LcTrajectory simulate(const LcModel& model, const VectorXd& x0, const std::vector<VectorXd>& inputs,
                      bool check_domain = true);

}  // namespace hyoc
