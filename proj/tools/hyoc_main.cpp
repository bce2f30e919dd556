#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hyoc/bench.hpp"
#include "hyoc/dc_to_lc.hpp"
#include "hyoc/io.hpp"
#include "hyoc/mpcc.hpp"
#include "hyoc/mpcc_solve.hpp"

using namespace hyoc;

namespace {

constexpr int kOk = 0;
constexpr int kVerificationFailed = 2;
constexpr int kIoError = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

template <typename F>
auto load(const std::string& path, F&& parse) {
  const Json j = read_json_file(path);
  try {
    return parse(j);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Io, path + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, path + ": " + e.what());
  }
}

Json config_json(const Globals& g) { return g.config.empty() ? Json::object() : read_json_file(g.config); }

void emit(const std::string& path, const std::string& text) {
  if (path.empty())
    std::cout << text;
  else
    write_text_file(path, text);
}

void emit(const std::string& path, const Json& j) { emit(path, j.dump(2) + "\n"); }

bool is_system(const Json& j) { return j.contains("psi"); }

QuadraticStageCost cost_for(const std::string& cost_path, const Json& cfg, int n_x, int n_u, int N) {
  if (!cost_path.empty()) return load(cost_path, cost_from_json);
  if (cfg.contains("cost")) return cost_from_json(cfg.at("cost"));
  return QuadraticStageCost::benchmark(n_x, n_u, N);
}

LcModel transform_system(const PwaDcSystem& sys, const std::string& form, double eta, double zeta) {
  const SupportPair sp = default_supports(sys, eta, zeta);
  const VectorXd Q = VectorXd::Ones(sys.n_x);
  LcModel m = form == "sparse" ? build_sparse(sys, sp, Q, Q) : build_compact(sys, sp, Q, Q);
  check_assumptions(m);
  return m;
}

Json assumption_json(const AssumptionReport& r) {
  return {{"assumption1", to_string(r.a1)},
          {"assumption2", to_string(r.a2)},
          {"assumption3", to_string(r.a3)},
          {"all_hold", r.all_hold()},
          {"details", r.details}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyoc: optimal control of hybrid systems in linear-complementarity form"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for every random stream");
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output file (stdout when omitted)");

  // transform
  auto* transform = app.add_subcommand("transform", "PWA-DC system to LC model");
  std::string tr_in;
  std::string tr_form = "compact";
  double eta = 0.5;
  double zeta = 0.5;
  transform->add_option("--in", tr_in, "System JSON")->required();
  transform->add_option("--form", tr_form, "sparse or compact")->check(CLI::IsMember({"sparse", "compact"}));
  transform->add_option("--eta", eta, "Support shift for psi");
  transform->add_option("--zeta", zeta, "Support shift for phi");
  transform->add_option("--out", g.out, "Model JSON");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Roll out a system or an LC model");
  std::string sim_system;
  std::string sim_model;
  std::string sim_x0;
  std::string sim_inputs;
  auto* sys_opt = sim->add_option("--system", sim_system, "System JSON");
  sim->add_option("--model", sim_model, "LC model JSON")->excludes(sys_opt);
  sim->add_option("--x0", sim_x0, "Initial state, comma separated")->required();
  sim->add_option("--inputs", sim_inputs, "Inputs u_0;u_1;... with comma separated entries")->required();
  sim->add_option("--out", g.out, "Trajectory JSON");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve the optimal control problem");
  std::string sv_model;
  std::string sv_x0;
  std::string sv_cost;
  std::string sv_method = "local";
  std::string sv_form = "compact";
  int sv_N = 1;
  int sv_starts = 1;
  double sv_limit = 60.0;
  bool sv_mssosc = false;
  solve->add_option("--model", sv_model, "LC model JSON, or a system JSON")->required();
  solve->add_option("--x0", sv_x0, "Initial state, comma separated")->required();
  solve->add_option("--N", sv_N, "Horizon")->required()->check(CLI::PositiveNumber);
  solve->add_option("--method", sv_method, "local or oracle")->check(CLI::IsMember({"local", "oracle"}));
  solve->add_option("--form", sv_form, "LC form used when --model holds a system")
      ->check(CLI::IsMember({"sparse", "compact"}));
  solve->add_option("--cost", sv_cost, "Cost JSON (default 1/2|x|^2 + 1/2|u|^2)");
  solve->add_option("--starts", sv_starts, "Local solver starts")->check(CLI::PositiveNumber);
  solve->add_option("--seed", seed_value, "Seed for restarts");
  solve->add_option("--time-limit", sv_limit, "Seconds");
  solve->add_flag("--mssosc", sv_mssosc, "Also test M-SSOSC at the solution");
  solve->add_option("--out", g.out, "Report JSON");

  // check
  auto* check = app.add_subcommand("check", "Verify a trajectory");
  std::string ck_model;
  std::string ck_traj;
  std::string ck_cost;
  std::string ck_level = "s";
  check->add_option("--model", ck_model, "LC model JSON")->required();
  check->add_option("--traj", ck_traj, "Trajectory or report JSON")->required();
  check->add_option("--cost", ck_cost, "Cost JSON");
  check->add_option("--level", ck_level, "kkt, s, m, global, mssosc or inputs")
      ->check(CLI::IsMember({"kkt", "s", "m", "global", "mssosc", "inputs"}));
  check->add_option("--out", g.out, "Verdict JSON");

  // bench
  auto* bench = app.add_subcommand("bench", "Random benchmark, CSV output");
  bench->add_option("--config", g.config, "Bench configuration JSON");
  bench->add_option("--seed", seed_value, "Seed");
  bench->add_option("--out", g.out, "CSV file");

  // profile
  auto* profile = app.add_subcommand("profile", "Performance profile of a bench CSV");
  std::string pf_in;
  std::vector<std::string> pf_methods;
  profile->add_option("--in", pf_in, "Bench CSV")->required();
  profile->add_option("--methods", pf_methods, "Methods to compare")->delimiter(',');
  profile->add_option("--out", g.out, "Profile CSV");

  // gaps
  auto* gaps = app.add_subcommand("gaps", "Objective gaps against the oracle");
  std::string gp_in;
  gaps->add_option("--in", gp_in, "Bench CSV")->required();
  gaps->add_option("--out", g.out, "Summary JSON");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0 || solve->get_option("--seed")->count() > 0 || bench->get_option("--seed")->count() > 0)
    g.seed = seed_value;

  try {
    if (*transform) {
      const PwaDcSystem sys = load(tr_in, system_from_json);
      const LcModel m = transform_system(sys, tr_form, eta, zeta);
      LcModel copy = m;
      const AssumptionReport rep = check_assumptions(copy);
      emit(g.out, to_json(m));
      std::cerr << assumption_json(rep).dump() << "\n";
      return rep.all_hold() ? kOk : kVerificationFailed;
    }

    if (*sim) {
      const VectorXd x0 = parse_vector(sim_x0);
      const auto inputs = parse_vector_list(sim_inputs);
      Trajectory t;
      t.x0 = x0;
      t.u = inputs;
      if (!sim_system.empty()) {
        const PwaDcSystem sys = load(sim_system, system_from_json);
        t.x = simulate(sys, x0, inputs);
      } else if (!sim_model.empty()) {
        const LcModel m = load(sim_model, model_from_json);
        const LcTrajectory tr = simulate(m, x0, inputs);
        t.x = tr.x;
        t.w = tr.w;
        if (m.aux) t.a = tr.a;
      } else {
        std::cerr << "simulate needs --system or --model\n";
        return 1;
      }
      emit(g.out, to_json(t));
      return kOk;
    }

    if (*solve) {
      const Json cfg = config_json(g);
      const Json src = read_json_file(sv_model);
      const VectorXd x0 = parse_vector(sv_x0);
      SolveReport rep;
      if (sv_method == "oracle") {
        if (!is_system(src)) {
          std::cerr << "the oracle needs a system JSON (psi/phi pieces) as --model\n";
          return 1;
        }
        const PwaDcSystem sys = load(sv_model, system_from_json);
        OracleOptions o;
        o.time_limit_s = sv_limit;
        rep = solve_global_oracle(sys, cost_for(sv_cost, cfg, sys.n_x, sys.n_u, sv_N), x0, sv_N, o);
      } else {
        const LcModel m = is_system(src) ? transform_system(load(sv_model, system_from_json), sv_form, 0.5, 0.5)
                                         : load(sv_model, model_from_json);
        const MpccProblem p = assemble(m, cost_for(sv_cost, cfg, m.n_x(), m.n_u(), sv_N), x0, sv_N, m.domain);
        LocalOptions o;
        o.starts = sv_starts;
        o.seed = g.seed.value_or(0);
        o.time_limit_s = sv_limit;
        o.check_mssosc = sv_mssosc;
        rep = solve_local(p, {}, o);
      }
      emit(g.out, to_json(rep, x0));
      std::cerr << to_string(rep.status) << " objective=" << rep.objective << "\n";
      return rep.status == SolveStatus::SStationary || rep.status == SolveStatus::Optimal ? kOk : kVerificationFailed;
    }

    if (*check) {
      const Json cfg = config_json(g);
      LcModel m = load(ck_model, model_from_json);
      if (m.blocks.empty()) check_assumptions(m);
      const Trajectory t = load(ck_traj, trajectory_from_json);
      const int N = static_cast<int>(t.u.size());
      require(N >= 1, ErrorCode::InvalidArgument, "trajectory has no inputs");
      require(static_cast<int>(t.x.size()) == N + 1, ErrorCode::DimensionMismatch, "x must hold x_0 .. x_N");
      const MpccProblem p = assemble(m, cost_for(ck_cost, cfg, m.n_x(), m.n_u(), N), t.x0, N, m.domain);
      std::vector<VectorXd> ws = t.w;
      std::vector<VectorXd> as = t.a;
      if (ws.empty()) {
        const LcTrajectory tr = simulate(m, t.x0, t.u, false);
        ws = tr.w;
        as = tr.a;
      }
      const VectorXd v = p.pack(t.u, std::vector<VectorXd>(t.x.begin() + 1, t.x.end()), ws, as);
      Json verdict = {{"level", ck_level}, {"infeasibility", p.infeasibility(v)}, {"objective", p.objective(v)}};
      bool ok = p.infeasibility(v) <= 1e-7;
      if (!ok) {
        verdict["reason"] = "trajectory is not feasible for the model";
      } else if (ck_level == "s" || ck_level == "global" || ck_level == "kkt") {
        const auto cert = certificate_lp(p, v, ck_level == "global" ? CertRegime::Global : CertRegime::S);
        ok = cert.has_value();
        if (cert && ck_level == "kkt") {
          const KktMultipliers k = to_kkt_multipliers(p, v, *cert);
          ok = check_classical_kkt(p, v, k);
          verdict["xi"] = k.xi;
        }
        if (cert) verdict["certificate"] = to_json(*cert);
      } else if (ck_level == "m") {
        const auto cert = find_m_certificate(p, v);
        ok = cert.has_value();
        if (cert) verdict["certificate"] = to_json(*cert);
      } else if (ck_level == "mssosc") {
        ok = check_mssosc(p, v);
      } else {
        const InputTrajectoryCheck ic = check_input_trajectory(p, v);
        ok = ic.locally_optimal;
        verdict["representatives_checked"] = ic.representatives_checked;
        if (!ic.locally_optimal && ic.witness.size() > 0) {
          std::vector<VectorXd> wit;
          for (int k = 0; k < N; ++k) wit.push_back(p.w(ic.witness, k));
          Json wj = Json::array();
          for (const auto& w : wit) wj.push_back(to_json(w));
          verdict["witness_w"] = wj;
        }
        verdict["reason"] = ic.reason;
      }
      verdict["verdict"] = ok;
      emit(g.out, verdict);
      return ok ? kOk : kVerificationFailed;
    }

    if (*bench) {
      const Json cfg = config_json(g);
      BenchConfig bc = bench_config_from_json(cfg.contains("bench") ? cfg.at("bench") : cfg);
      if (g.seed) bc.seed = *g.seed;
      const auto records = run_bench(bc);
      emit(g.out, emit_csv(records));
      const GapSummary gs = gap_stats(records);
      bool ok = gs.worst_violation <= 1e-6;
      for (const auto& r : records) ok = ok && r.status != "Error" && r.status != "VerifyFailed";
      for (const auto& [m, f] : gs.fraction_global)
        std::cerr << m << ": global " << f << ", within 10% " << gs.fraction_within_10.at(m) << "\n";
      return ok ? kOk : kVerificationFailed;
    }

    if (*profile) {
      const auto records = parse_csv(read_text_file(pf_in));
      std::vector<std::string> methods = pf_methods;
      if (methods.empty())
        for (const auto& r : records)
          if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
      const auto table = performance_profile(records, methods);
      std::ostringstream os;
      os << "tau";
      for (const auto& m : methods) os << ',' << m;
      os << '\n' << std::setprecision(17);
      for (const auto& pt : table) {
        os << pt.tau;
        for (const auto& m : methods) os << ',' << pt.rho.at(m);
        os << '\n';
      }
      emit(g.out, os.str());
      return kOk;
    }

    if (*gaps) {
      const auto records = parse_csv(read_text_file(gp_in));
      const GapSummary gs = gap_stats(records);
      Json per = Json::array();
      for (const auto& x : gs.gaps)
        per.push_back({{"system", x.system},
                       {"N", x.N},
                       {"x0", to_json(x.x0)},
                       {"method", x.method},
                       {"gap", x.solved ? Json(x.gap) : Json(nullptr)},
                       {"absolute", x.absolute}});
      Json out = {{"instances", gs.instances},
                  {"fraction_global", gs.fraction_global},
                  {"fraction_within_10pct", gs.fraction_within_10},
                  {"worst_violation", gs.worst_violation},
                  {"gaps", per}};
      emit(g.out, out);
      return gs.worst_violation <= 1e-6 ? kOk : kVerificationFailed;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? kIoError : kVerificationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
