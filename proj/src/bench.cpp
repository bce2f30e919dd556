#include "hyoc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "hyoc/dc_to_lc.hpp"
#include "hyoc/mpcc_solve.hpp"
#include "hyoc/rng.hpp"

namespace hyoc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double oracle_size(int py, int pz, int N) { return std::pow(static_cast<double>(py) * pz, N); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  require(pos == s.size(), ErrorCode::InvalidArgument, "bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

using InstanceKey = std::tuple<int, int, std::vector<double>>;

InstanceKey key_of(const BenchRecord& r) {
  return {r.system, r.N, std::vector<double>(r.x0.data(), r.x0.data() + r.x0.size())};
}

struct SystemModels {
  PwaDcSystem sys;
  LcModel sparse;
  LcModel compact;
};

// Trajectory check against the PWA dynamics and the cost.
bool verify(const PwaDcSystem& sys, const QuadraticStageCost& cost, const VectorXd& x0, const SolveReport& rep) {
  if (static_cast<int>(rep.u.size()) != cost.horizon()) return false;
  std::vector<VectorXd> xs;
  try {
    xs = simulate(sys, x0, rep.u);
  } catch (const Error&) {
    return false;
  }
  for (size_t k = 0; k < xs.size(); ++k)
    if ((xs[k] - rep.x[k]).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + xs[k].cwiseAbs().maxCoeff())) return false;
  return std::abs(cost.evaluate(xs, rep.u) - rep.objective) <= 1e-7 * (1.0 + std::abs(rep.objective));
}

SolveReport run_method(const std::string& method, const SystemModels& sm, const QuadraticStageCost& cost,
                       const VectorXd& x0, int N, const BenchConfig& cfg) {
  if (method == "oracle") {
    OracleOptions o;
    o.time_limit_s = cfg.time_limit_s;
    return solve_global_oracle(sm.sys, cost, x0, N, o);
  }
  const LcModel& m = method == "local-sparse" ? sm.sparse : sm.compact;
  const MpccProblem p = assemble(m, cost, x0, N, m.domain);
  LocalOptions o;
  o.starts = cfg.starts;
  o.seed = cfg.seed;
  o.time_limit_s = cfg.time_limit_s;
  return solve_local(p, {}, o);
}

}  // namespace

void BenchConfig::validate() const {
  require(n_systems >= 1 && n_states >= 1 && starts >= 1, ErrorCode::InvalidArgument, "bench counts must be >= 1");
  require(!dims.empty() && !horizons.empty() && !methods.empty(), ErrorCode::InvalidArgument,
          "bench lists must be nonempty");
  for (const auto& [nx, nu] : dims) require(nx >= 1 && nu >= 1, ErrorCode::InvalidArgument, "bad dims");
  require(pieces_min >= 1 && pieces_max >= pieces_min, ErrorCode::InvalidArgument, "bad pieces range");
  for (int N : horizons) {
    require(N >= 1, ErrorCode::InvalidArgument, "horizons must be >= 1");
    require(oracle_size(pieces_max, pieces_max, N) <= 1e6, ErrorCode::SizeLimit,
            "pieces_max^(2N) exceeds the oracle size guard for N=" + std::to_string(N));
  }
  for (const auto& m : methods)
    require(m == "oracle" || m == "local-sparse" || m == "local-compact", ErrorCode::InvalidArgument,
            "unknown method " + m);
  require(time_limit_s > 0.0 && x0_radius > 0.0, ErrorCode::InvalidArgument, "bad limits");
}

bool BenchRecord::same_except_time(const BenchRecord& o) const {
  auto eq = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  return system == o.system && N == o.N && x0 == o.x0 && method == o.method && status == o.status &&
         eq(objective, o.objective) && s_stationary == o.s_stationary && global_cert == o.global_cert;
}

PwaDcSystem example_system() {
  PwaDcSystem s;
  s.n_x = 1;
  s.n_u = 1;
  s.psi.pieces = {{MatrixXd::Constant(1, 1, -1.0), MatrixXd::Constant(1, 1, -1.0), VectorXd::Constant(1, -2.0)},
                  {MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), VectorXd::Constant(1, -1.0)}};
  s.phi.pieces = {{MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), VectorXd::Zero(1)}};
  s.domain = Polytope::whole_space(2);
  return s;
}

std::vector<PwaDcSystem> bench_systems(const BenchConfig& cfg) {
  std::vector<PwaDcSystem> out;
  for (int i = 0; i < cfg.n_systems; ++i) {
    Rng rng(cfg.seed, "system/" + std::to_string(i));
    const auto [nx, nu] = cfg.dims[static_cast<size_t>(i) % cfg.dims.size()];
    const int py = rng.uniform_int(cfg.pieces_min, cfg.pieces_max);
    const int pz = rng.uniform_int(cfg.pieces_min, cfg.pieces_max);
    out.push_back(random_dc_system(nx, nu, py, pz, rng.engine()()));
  }
  if (cfg.include_example) out.push_back(example_system());
  return out;
}

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRecord> records;
  const auto systems = bench_systems(cfg);
  bool warmed = false;

  for (size_t i = 0; i < systems.size(); ++i) {
    const bool example = cfg.include_example && i + 1 == systems.size();
    SystemModels sm{systems[i], {}, {}};
    const SupportPair sp = default_supports(sm.sys);
    const VectorXd Qy = VectorXd::Ones(sm.sys.n_x);
    sm.sparse = build_sparse(sm.sys, sp, Qy, Qy);
    sm.compact = build_compact(sm.sys, sp, Qy, Qy);
    check_assumptions(sm.sparse);
    check_assumptions(sm.compact);

    const std::vector<int> horizons = example ? std::vector<int>{1} : cfg.horizons;
    for (int N : horizons) {
      const QuadraticStageCost cost = QuadraticStageCost::benchmark(sm.sys.n_x, sm.sys.n_u, N);
      Rng rng(cfg.seed, "x0/" + std::to_string(i) + "/" + std::to_string(N));
      const int n_states = example ? 1 : cfg.n_states;
      for (int s = 0; s < n_states; ++s) {
        // Draw x0 until the oracle finds a feasible trajectory.
        VectorXd x0 = VectorXd::Zero(sm.sys.n_x);
        bool found = example;
        for (int draw = 0; draw < 100 && !found; ++draw) {
          x0 = rng.uniform_vector(sm.sys.n_x, -cfg.x0_radius, cfg.x0_radius);
          OracleOptions o;
          o.time_limit_s = cfg.time_limit_s;
          found = solve_global_oracle(sm.sys, cost, x0, N, o).status == SolveStatus::Optimal;
        }
        if (!found) continue;
        if (!warmed) {
          for (const auto& m : cfg.methods) {
            try {
              run_method(m, sm, cost, x0, N, cfg);
            } catch (const std::exception&) {
            }
          }
          warmed = true;
        }
        for (const auto& method : cfg.methods) {
          BenchRecord r;
          r.system = static_cast<int>(i);
          r.N = N;
          r.x0 = x0;
          r.method = method;
          r.objective = kInf;
          try {
            const auto t0 = Clock::now();
            const SolveReport rep = run_method(method, sm, cost, x0, N, cfg);
            r.time_s = std::max(std::chrono::duration<double>(Clock::now() - t0).count(), 1e-9);
            r.status = to_string(rep.status);
            const bool ok = rep.status == SolveStatus::Optimal || rep.status == SolveStatus::SStationary;
            if (ok) {
              r.objective = rep.objective;
              if (!verify(sm.sys, cost, x0, rep)) r.status = "VerifyFailed";
            }
            r.s_stationary = rep.s_stationary;
            r.global_cert = rep.global_certified;
          } catch (const std::exception& e) {
            r.status = "Error";
            r.time_s = std::max(r.time_s, 1e-9);
          }
          records.push_back(r);
        }
      }
    }
  }
  return records;
}

std::string emit_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "system,N,x0,method,status,time_s,objective,s_stationary,global_cert\n";
  for (const auto& r : records) {
    os << r.system << ',' << r.N << ',';
    for (Eigen::Index i = 0; i < r.x0.size(); ++i) os << (i ? ";" : "") << fmt(r.x0(i));
    os << ',' << r.method << ',' << r.status << ',' << fmt(r.time_s) << ',' << fmt(r.objective) << ','
       << (r.s_stationary ? 1 : 0) << ',' << (r.global_cert ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<BenchRecord> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::InvalidArgument, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "system,N,x0,method,status,time_s,objective,s_stationary,global_cert", ErrorCode::InvalidArgument,
          "unexpected CSV header");
  std::vector<BenchRecord> out;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    require(f.size() == 9, ErrorCode::InvalidArgument, "CSV row needs 9 fields: " + line);
    BenchRecord r;
    r.system = std::stoi(f[0]);
    r.N = std::stoi(f[1]);
    const auto xs = f[2].empty() ? std::vector<std::string>{} : split(f[2], ';');
    r.x0.resize(static_cast<Eigen::Index>(xs.size()));
    for (size_t k = 0; k < xs.size(); ++k) r.x0(static_cast<Eigen::Index>(k)) = parse_double(xs[k]);
    r.method = f[3];
    r.status = f[4];
    r.time_s = parse_double(f[5]);
    r.objective = parse_double(f[6]);
    r.s_stationary = f[7] == "1";
    r.global_cert = f[8] == "1";
    out.push_back(r);
  }
  return out;
}

bool record_solved(const BenchRecord& r) {
  return (r.status == "Optimal" || r.status == "SStationary") && std::isfinite(r.objective);
}

std::vector<ProfilePoint> performance_profile(const std::vector<BenchRecord>& records,
                                              const std::vector<std::string>& methods) {
  require(!methods.empty(), ErrorCode::InvalidArgument, "no methods");
  std::map<InstanceKey, std::map<std::string, double>> times;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) continue;
    times[key_of(r)][r.method] = record_solved(r) ? r.time_s : kInf;
  }
  require(!times.empty(), ErrorCode::MissingRecords, "no records for the requested methods");
  std::map<std::string, std::vector<double>> ratios;
  for (const auto& [key, per] : times) {
    double best = kInf;
    for (const auto& m : methods) {
      const auto it = per.find(m);
      require(it != per.end(), ErrorCode::MissingRecords,
              "missing record for method " + m + " on system " + std::to_string(std::get<0>(key)));
      best = std::min(best, it->second);
    }
    for (const auto& m : methods) ratios[m].push_back(std::isfinite(best) ? per.at(m) / best : kInf);
  }
  std::set<double> taus{1.0};
  for (const auto& [m, rs] : ratios)
    for (double r : rs)
      if (std::isfinite(r)) taus.insert(r);
  const double n = static_cast<double>(times.size());
  std::vector<ProfilePoint> out;
  for (double tau : taus) {
    ProfilePoint pt;
    pt.tau = tau;
    for (const auto& m : methods)
      pt.rho[m] = static_cast<double>(std::count_if(ratios[m].begin(), ratios[m].end(),
                                                    [&](double r) { return r <= tau; })) /
                  n;
    out.push_back(pt);
  }
  return out;
}

GapSummary gap_stats(const std::vector<BenchRecord>& records) {
  std::map<InstanceKey, const BenchRecord*> oracle;
  for (const auto& r : records)
    if (r.method == "oracle") oracle[key_of(r)] = &r;
  GapSummary out;
  std::map<std::string, int> global;
  std::map<std::string, int> within;
  for (const auto& r : records) {
    if (r.method == "oracle") continue;
    const auto it = oracle.find(key_of(r));
    require(it != oracle.end(), ErrorCode::MissingRecords,
            "no oracle record for system " + std::to_string(r.system) + ", N=" + std::to_string(r.N));
    const BenchRecord& o = *it->second;
    if (!record_solved(o)) continue;
    InstanceGap g{r.system, r.N, r.x0, r.method, kInf, false, record_solved(r)};
    ++out.instances[r.method];
    global[r.method];
    within[r.method];
    if (g.solved) {
      const double diff = r.objective - o.objective;
      out.worst_violation = std::max(out.worst_violation, -diff);
      g.absolute = std::abs(o.objective) < 1e-12;
      g.gap = g.absolute ? diff : diff / std::abs(o.objective) * 100.0;
      const double rel = g.absolute ? diff : diff / std::abs(o.objective);
      if (rel <= 1e-6) ++global[r.method];
      if (g.absolute ? diff <= 1e-6 : g.gap <= 10.0 + 1e-9) ++within[r.method];
    }
    out.gaps.push_back(g);
  }
  for (const auto& [m, n] : out.instances) {
    out.fraction_global[m] = static_cast<double>(global[m]) / n;
    out.fraction_within_10[m] = static_cast<double>(within[m]) / n;
  }
  return out;
}

}  // namespace hyoc
