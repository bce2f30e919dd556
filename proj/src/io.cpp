#include "hyoc/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hyoc {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

const Json& field(const Json& j, const char* name) {
  require(j.is_object() && j.contains(name), ErrorCode::InvalidArgument, std::string("missing field '") + name + "'");
  return j.at(name);
}

Json vectors_to_json(const std::vector<VectorXd>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

std::vector<VectorXd> vectors_from_json(const Json& j) {
  std::vector<VectorXd> out;
  for (const auto& e : j) out.push_back(vector_from_json(e));
  return out;
}

Json piece_json(const AffinePiece& p) { return {{"A", to_json(p.A)}, {"B", to_json(p.B)}, {"c", to_json(p.c)}}; }

MaxAffine max_affine_from_json(const Json& j, int n_x, int n_u) {
  MaxAffine g;
  for (const auto& p : field(j, "pieces"))
    g.pieces.push_back({matrix_from_json(field(p, "A"), n_x), matrix_from_json(field(p, "B"), n_u),
                        vector_from_json(field(p, "c"))});
  return g;
}

Json max_affine_json(const MaxAffine& g) {
  Json pieces = Json::array();
  for (const auto& p : g.pieces) pieces.push_back(piece_json(p));
  return {{"pieces", pieces}};
}

}  // namespace

Json to_json(const MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

MatrixXd matrix_from_json(const Json& j, Eigen::Index cols_hint) {
  require(j.is_array(), ErrorCode::InvalidArgument, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return MatrixXd(0, std::max<Eigen::Index>(cols_hint, 0));
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols, ErrorCode::DimensionMismatch,
            "ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = row[static_cast<size_t>(k)].get<double>();
  }
  require(cols_hint < 0 || cols == cols_hint, ErrorCode::DimensionMismatch,
          "matrix has " + std::to_string(cols) + " columns, expected " + std::to_string(cols_hint));
  return M;
}

VectorXd vector_from_json(const Json& j) {
  require(j.is_array(), ErrorCode::InvalidArgument, "vector must be an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from(j[i]);
  return v;
}

Json to_json(const Polytope& p) { return {{"H", to_json(p.H)}, {"k", to_json(p.k)}}; }

Polytope polytope_from_json(const Json& j, Eigen::Index dim) {
  Polytope p;
  p.H = matrix_from_json(field(j, "H"), dim);
  p.k = vector_from_json(field(j, "k"));
  require(p.k.size() == p.H.rows(), ErrorCode::DimensionMismatch, "domain H and k differ in rows");
  return p;
}

Json to_json(const PwaDcSystem& sys) {
  return {{"n_x", sys.n_x},
          {"n_u", sys.n_u},
          {"psi", max_affine_json(sys.psi)},
          {"phi", max_affine_json(sys.phi)},
          {"domain", to_json(sys.domain)}};
}

PwaDcSystem system_from_json(const Json& j) {
  PwaDcSystem sys;
  sys.n_x = field(j, "n_x").get<int>();
  sys.n_u = field(j, "n_u").get<int>();
  sys.psi = max_affine_from_json(field(j, "psi"), sys.n_x, sys.n_u);
  sys.phi = max_affine_from_json(field(j, "phi"), sys.n_x, sys.n_u);
  sys.domain = j.contains("domain") ? polytope_from_json(j.at("domain"), sys.n_x + sys.n_u)
                                    : Polytope::whole_space(sys.n_x + sys.n_u);
  sys.validate();
  return sys;
}

Json to_json(const LcModel& m) {
  Json j = {{"A", to_json(m.A)},     {"B_u", to_json(m.B_u)}, {"B_w", to_json(m.B_w)}, {"c", to_json(m.c)},
            {"E_w", to_json(m.E_w)}, {"E_x", to_json(m.E_x)}, {"E_u", to_json(m.E_u)}, {"e", to_json(m.e)},
            {"n_x", m.n_x()},        {"n_u", m.n_u()},        {"n_w", m.n_w()},        {"domain", to_json(m.domain)}};
  if (!m.blocks.empty()) {
    Json blocks = Json::array();
    for (const auto& b : m.blocks) blocks.push_back({{"indices", b.indices}, {"m", to_json(b.m)}});
    j["blocks"] = blocks;
  }
  if (m.aux) {
    const AuxStructure& a = *m.aux;
    j["aux"] = {{"B_a", to_json(a.B_a)}, {"E_a", to_json(a.E_a)}, {"F_x", to_json(a.F_x)}, {"F_u", to_json(a.F_u)},
                {"F_w", to_json(a.F_w)}, {"F_a", to_json(a.F_a)}, {"f", to_json(a.f)}};
  }
  return j;
}

LcModel model_from_json(const Json& j) {
  LcModel m;
  m.A = matrix_from_json(field(j, "A"));
  const Eigen::Index nx = m.A.rows();
  const Eigen::Index nu = j.contains("n_u") ? j.at("n_u").get<Eigen::Index>() : -1;
  const Eigen::Index nw = j.contains("n_w") ? j.at("n_w").get<Eigen::Index>() : -1;
  m.B_u = matrix_from_json(field(j, "B_u"), nu);
  m.B_w = matrix_from_json(field(j, "B_w"), nw);
  m.c = vector_from_json(field(j, "c"));
  m.E_w = matrix_from_json(field(j, "E_w"), nw);
  m.E_x = matrix_from_json(field(j, "E_x"), nx);
  m.E_u = matrix_from_json(field(j, "E_u"), m.B_u.cols());
  m.e = vector_from_json(field(j, "e"));
  m.domain = j.contains("domain") ? polytope_from_json(j.at("domain"), nx + m.B_u.cols())
                                  : Polytope::whole_space(nx + m.B_u.cols());
  if (j.contains("blocks"))
    for (const auto& b : j.at("blocks"))
      m.blocks.push_back({field(b, "indices").get<IndexList>(), vector_from_json(field(b, "m"))});
  if (j.contains("aux")) {
    const Json& a = j.at("aux");
    AuxStructure s;
    s.F_a = matrix_from_json(field(a, "F_a"));
    s.B_a = matrix_from_json(field(a, "B_a"), s.F_a.cols());
    s.E_a = matrix_from_json(field(a, "E_a"), s.F_a.cols());
    s.F_x = matrix_from_json(field(a, "F_x"), nx);
    s.F_u = matrix_from_json(field(a, "F_u"), m.B_u.cols());
    s.F_w = matrix_from_json(field(a, "F_w"), m.E_w.cols());
    s.f = vector_from_json(field(a, "f"));
    m.aux = s;
  }
  m.validate();
  return m;
}

Json to_json(const QuadraticStageCost& c) {
  Json stages = Json::array();
  for (const auto& s : c.stages)
    stages.push_back({{"Q", to_json(s.Q)},
                      {"R", to_json(s.R)},
                      {"q", to_json(s.q)},
                      {"r", to_json(s.r)},
                      {"constant", s.constant}});
  return {{"stages", stages}, {"Q_N", to_json(c.Q_N)}, {"q_N", to_json(c.q_N)}, {"c_N", c.c_N}};
}

QuadraticStageCost cost_from_json(const Json& j) {
  QuadraticStageCost c;
  for (const auto& s : field(j, "stages")) {
    StageCost st;
    st.Q = matrix_from_json(field(s, "Q"));
    st.R = matrix_from_json(field(s, "R"));
    st.q = s.contains("q") ? vector_from_json(s.at("q")) : VectorXd::Zero(st.Q.rows());
    st.r = s.contains("r") ? vector_from_json(s.at("r")) : VectorXd::Zero(st.R.rows());
    st.constant = s.value("constant", 0.0);
    c.stages.push_back(st);
  }
  c.Q_N = matrix_from_json(field(j, "Q_N"));
  c.q_N = j.contains("q_N") ? vector_from_json(j.at("q_N")) : VectorXd::Zero(c.Q_N.rows());
  c.c_N = j.value("c_N", 0.0);
  return c;
}

Json to_json(const Trajectory& t) {
  Json j = {{"x0", to_json(t.x0)}, {"u", vectors_to_json(t.u)}, {"x", vectors_to_json(t.x)},
            {"w", vectors_to_json(t.w)}};
  if (!t.a.empty()) j["a"] = vectors_to_json(t.a);
  return j;
}

Trajectory trajectory_from_json(const Json& j) {
  Trajectory t;
  t.u = vectors_from_json(field(j, "u"));
  t.x = vectors_from_json(field(j, "x"));
  t.x0 = j.contains("x0") ? vector_from_json(j.at("x0")) : (t.x.empty() ? VectorXd() : t.x.front());
  if (j.contains("w")) t.w = vectors_from_json(j.at("w"));
  if (j.contains("a")) t.a = vectors_from_json(j.at("a"));
  return t;
}

Json to_json(const MpccMultipliers& m) {
  return {{"eta", to_json(m.eta)}, {"mu", to_json(m.mu)}, {"nu_G", to_json(m.nu_G)}, {"nu_H", to_json(m.nu_H)}};
}

Json to_json(const SolveReport& r, const VectorXd& x0) {
  Trajectory t{x0, r.u, r.x, r.w, {}};
  Json j = to_json(t);
  j["status"] = to_string(r.status);
  j["objective"] = number(r.objective);
  j["s_stationary"] = r.s_stationary;
  j["global_certified"] = r.global_certified;
  if (r.mssosc) j["mssosc"] = *r.mssosc;
  j["iterations"] = r.iterations;
  j["qp_solves"] = r.qp_solves;
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  if (!r.sequence.empty()) j["sequence"] = r.sequence;
  if (!r.assignment.empty()) {
    std::string a;
    for (Side s : r.assignment) a += s == Side::GActive ? 'G' : 'H';
    j["assignment"] = a;
  }
  return j;
}

Json to_json(const BenchConfig& c) {
  Json dims = Json::array();
  for (const auto& [nx, nu] : c.dims) dims.push_back({nx, nu});
  return {{"n_systems", c.n_systems}, {"dims", dims},         {"pieces_min", c.pieces_min},
          {"pieces_max", c.pieces_max}, {"horizons", c.horizons}, {"n_states", c.n_states},
          {"seed", c.seed},             {"methods", c.methods},   {"time_limit_s", c.time_limit_s},
          {"starts", c.starts},         {"include_example", c.include_example}, {"x0_radius", c.x0_radius}};
}

BenchConfig bench_config_from_json(const Json& j) {
  BenchConfig c;
  c.n_systems = j.value("n_systems", c.n_systems);
  if (j.contains("dims")) {
    c.dims.clear();
    for (const auto& d : j.at("dims")) c.dims.emplace_back(d.at(0).get<int>(), d.at(1).get<int>());
  }
  c.pieces_min = j.value("pieces_min", c.pieces_min);
  c.pieces_max = j.value("pieces_max", c.pieces_max);
  c.horizons = j.value("horizons", c.horizons);
  c.n_states = j.value("n_states", c.n_states);
  c.seed = j.value("seed", c.seed);
  c.methods = j.value("methods", c.methods);
  c.time_limit_s = j.value("time_limit_s", c.time_limit_s);
  c.starts = j.value("starts", c.starts);
  c.include_example = j.value("include_example", c.include_example);
  c.x0_radius = j.value("x0_radius", c.x0_radius);
  c.validate();
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Io, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

VectorXd parse_vector(const std::string& s) {
  std::vector<double> vals;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    size_t pos = 0;
    vals.push_back(std::stod(tok.substr(b), &pos));
  }
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::vector<VectorXd> parse_vector_list(const std::string& s) {
  std::vector<VectorXd> out;
  std::string group;
  std::istringstream is(s);
  while (std::getline(is, group, ';')) out.push_back(parse_vector(group));
  return out;
}

}  // namespace hyoc
