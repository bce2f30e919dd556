#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hyoc {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using ConstMatrixRef = Eigen::Ref<const MatrixXd>;
using ConstVectorRef = Eigen::Ref<const VectorXd>;
using IndexList = std::vector<int>;

/// Shared activity threshold: a complementarity quantity is "zero" iff |.| <= kActivityTol.
inline constexpr double kActivityTol = 1e-8;
/// Primal feasibility tolerance for LP/QP outputs and domain membership.
inline constexpr double kFeasTol = 1e-9;

enum class ErrorCode {
  Degenerate,
  IllConditioned,
  OutOfDomain,
  GenerationFailed,
  NotASolution,
  DegenerateExhausted,
  SizeLimit,
  SupportViolated,
  DimensionMismatch,
  InfeasiblePoint,
  LcpInfeasible,
  MissingRecords,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::NotASolution: return "NotASolution";
    case ErrorCode::DegenerateExhausted: return "DegenerateExhausted";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::SupportViolated: return "SupportViolated";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::LcpInfeasible: return "LcpInfeasible";
    case ErrorCode::MissingRecords: return "MissingRecords";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

/// Vertical stack of two matrices with equal column counts (either may be empty).
inline MatrixXd vstack(const MatrixXd& top, const MatrixXd& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

inline VectorXd vstack(const VectorXd& top, const VectorXd& bottom) {
  VectorXd out(top.size() + bottom.size());
  out << top, bottom;
  return out;
}

}  // namespace hyoc
