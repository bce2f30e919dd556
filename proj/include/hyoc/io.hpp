#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hyoc/bench.hpp"
#include "hyoc/lc_model.hpp"
#include "hyoc/mpcc.hpp"
#include "hyoc/mpcc_solve.hpp"
#include "hyoc/pwa_dc.hpp"

namespace hyoc {

using Json = nlohmann::json;

/// Matrices are row-major nested arrays; an empty matrix keeps its column count under "cols" when nonzero.
Json to_json(const MatrixXd& M);
Json to_json(const VectorXd& v);
MatrixXd matrix_from_json(const Json& j, Eigen::Index cols_hint = -1);
VectorXd vector_from_json(const Json& j);

Json to_json(const Polytope& p);
Polytope polytope_from_json(const Json& j, Eigen::Index dim);

Json to_json(const PwaDcSystem& sys);
PwaDcSystem system_from_json(const Json& j);

Json to_json(const LcModel& m);
LcModel model_from_json(const Json& j);

Json to_json(const QuadraticStageCost& c);
QuadraticStageCost cost_from_json(const Json& j);

/// {"x0", "u": [u_0..u_{N-1}], "x": [x_0..x_N], "w": [w_0..w_{N-1}], "a"?: [...]}
struct Trajectory {
  VectorXd x0;
  std::vector<VectorXd> u;
  std::vector<VectorXd> x;
  std::vector<VectorXd> w;
  std::vector<VectorXd> a;
};

Json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const Json& j);

Json to_json(const MpccMultipliers& m);
Json to_json(const SolveReport& r, const VectorXd& x0);

Json to_json(const BenchConfig& c);
BenchConfig bench_config_from_json(const Json& j);

/// Throws Error(Io) when the file cannot be read or parsed.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// "1,2;3,4" -> {(1,2), (3,4)}; a single group without ';' gives one vector.
std::vector<VectorXd> parse_vector_list(const std::string& s);
VectorXd parse_vector(const std::string& s);

}  // namespace hyoc
