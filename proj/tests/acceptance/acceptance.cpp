#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hyoc/bench.hpp"
#include "hyoc/dc_to_lc.hpp"
#include "hyoc/lcp.hpp"
#include "hyoc/mpcc.hpp"
#include "hyoc/mpcc_solve.hpp"
#include "hyoc/rng.hpp"
#include "../oracles.hpp"

using namespace hyoc;
using oracle::small_point;
using oracle::vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double max_abs(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double max_step_error(const PwaDcSystem& sys, const LcModel& m, int points, std::uint64_t seed) {
  Rng rng(seed, "acceptance/points");
  double worst = 0.0;
  for (int t = 0; t < points; ++t) {
    const VectorXd x = rng.uniform_vector(sys.n_x, -5, 5);
    const VectorXd u = rng.uniform_vector(sys.n_u, -5, 5);
    worst = std::max(worst, max_abs(step(m, x, u).x_plus - eval_dynamics(sys, x, u)));
  }
  return worst;
}

Outcome small_example_cases() {
  Outcome o;
  const auto p = oracle::small_problem();
  const VectorXd c1 = small_point(-1, 1, 0);
  const auto cert = certificate_lp(p, c1, CertRegime::S);
  o.expect(cert.has_value(), "case 1 has no S certificate");
  if (cert) {
    o.expect(std::abs(cert->mu(0) - 1.0) <= 1e-7, "mu != 1");
    o.expect(max_abs(cert->nu_G - vec({-1, 0})) <= 1e-7, "nu != (-1,0)");
    o.expect(max_abs(cert->nu_H) <= 1e-7, "lambda != 0");
  }
  const VectorXd c2 = small_point(-1, 0.5, 0.5);
  o.expect(certificate_lp(p, c2, CertRegime::S).has_value(), "case 2 not S-stationary");
  const VectorXd c3 = small_point(-1, 0, 1);
  o.expect(!certificate_lp(p, c3, CertRegime::S).has_value(), "case 3 S-stationary");
  o.expect(find_m_certificate(p, c3).has_value(), "case 3 not M-stationary");
  const auto check = check_input_trajectory(p, c1);
  o.expect(!check.locally_optimal, "u=-1 reported locally optimal");
  o.expect(check.witness.size() == p.n_v() && max_abs(p.w(check.witness, 0) - vec({0, 1})) <= 1e-7,
           "witness w != (0,1)");
  return o;
}

Outcome oracle_and_local() {
  Outcome o;
  const auto [u_best, J_best] = oracle::grid_min(oracle::small_cost_of_u, -5, 5, 1e-4);
  o.expect(std::abs(u_best) <= 1e-9 && std::abs(J_best - 0.5) <= 1e-9, "grid search disagrees");
  const auto sys = example_system();
  const auto cost = oracle::small_cost();
  const auto rep = solve_global_oracle(sys, cost, vec({0}), 1);
  o.expect(rep.status == SolveStatus::Optimal, "oracle not optimal");
  o.expect(std::abs(rep.objective - 0.5) <= 1e-7 && max_abs(rep.u[0]) <= 1e-7, "oracle u*, J* wrong");
  const auto p = oracle::small_problem();
  LocalInit init;
  init.point = small_point(-1, 0, 1);
  const auto loc = solve_local(p, init);
  o.expect(loc.status == SolveStatus::SStationary, std::string("local status ") + to_string(loc.status));
  o.expect(loc.objective <= 1.0 - 1e-6, "local did not leave case 3");
  return o;
}

Outcome transform_equivalence() {
  Outcome o;
  const auto plane = oracle::plane_system();
  SupportPair hand{AffinePiece{MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), vec({1})},
                   AffinePiece{MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1), vec({0})}, 0, 0};
  std::vector<std::pair<PwaDcSystem, SupportPair>> cases{{plane, hand}};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed, "acceptance/dims");
    const int nx = rng.uniform_int(1, 3);
    const int nu = rng.uniform_int(1, 2);
    auto sys = random_dc_system(nx, nu, rng.uniform_int(1, 4), rng.uniform_int(1, 4), 1000 + seed);
    cases.emplace_back(sys, default_supports(sys));
  }
  for (size_t i = 0; i < cases.size(); ++i) {
    const auto& [sys, sp] = cases[i];
    const VectorXd Q = VectorXd::Ones(sys.n_x);
    const double es = max_step_error(sys, build_sparse(sys, sp, Q, Q), 100, i);
    LcModel c = build_compact(sys, sp, Q, Q);
    const bool holds = check_assumptions(c).all_hold();
    const double ec = max_step_error(sys, c, 100, i);
    o.expect(es <= 1e-7 && ec <= 1e-7, "system " + std::to_string(i) + " step error");
    o.expect(holds, "system " + std::to_string(i) + " compact assumptions");
  }
  return o;
}

Outcome lcp_suite() {
  Outcome o;
  Rng rng(4, "acceptance/lcp");
  int solved = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = rng.uniform_int(1, 8);
    VectorXd m(n);
    for (int i = 0; i < n; ++i) m(i) = (rng.uniform(0, 1) < 0.5 ? -1 : 1) * rng.uniform(0.2, 2.0);
    const RankOneLcp lcp{m, rng.uniform_vector(n, -1, 1), false};
    const auto w = solve_lcp(lcp);
    const auto sols = oracle::sign_pattern_solutions(lcp.M(), lcp.q);
    const std::string tag = "instance " + std::to_string(t);
    if (w.has_value() != !sols.empty()) {
      o.expect(false, tag + " solvability");
      continue;
    }
    if (!w) continue;
    ++solved;
    o.expect(oracle::in_pattern_set(lcp.M(), lcp.q, *w), tag + " outside pattern set");
    const auto set = solution_set(lcp, *w);
    const VectorXd s_ref = lcp.M() * *w + lcp.q;
    for (const auto& f : faces(set))
      o.expect(max_abs(lcp.M() * f.representative + lcp.q - s_ref) <= 1e-9, tag + " s not invariant");
    const VectorXd nd = nondegenerate_solution(set);
    o.expect(set.contains(nd) && index_sets(lcp, nd).beta.empty(), tag + " nondegenerate");
  }
  o.expect(solved >= 50, "too few solvable instances");
  return o;
}

// Shifts psi so that the origin is an equilibrium; x0 = 0 then has zero optimal cost.
PwaDcSystem anchored(PwaDcSystem sys) {
  const VectorXd f0 = eval_dynamics(sys, VectorXd::Zero(sys.n_x), VectorXd::Zero(sys.n_u));
  for (auto& piece : sys.psi.pieces) piece.c -= f0;
  return sys;
}

Outcome certificates() {
  Outcome o;
  int checked = 0;
  int global = 0;
  int anchored_global = 0;
  for (std::uint64_t seed = 0; checked < 50 && seed < 500; ++seed) {
    const bool zero_state = seed % 5 == 0;
    auto sys = random_dc_system(1, 1, 2, 2, seed);
    if (zero_state) sys = anchored(sys);
    LcModel m = build_compact(sys, default_supports(sys), VectorXd::Ones(1), VectorXd::Ones(1));
    check_assumptions(m);
    Rng rng(seed, "acceptance/x0");
    const VectorXd x0 = zero_state ? VectorXd::Zero(1) : rng.uniform_vector(1, -2, 2);
    const auto cost = QuadraticStageCost::benchmark(1, 1, 2);
    const auto p = assemble(m, cost, x0, 2, m.domain);
    LocalOptions opt;
    opt.starts = 3;
    opt.seed = seed;
    const auto rep = solve_local(p, {}, opt);
    if (rep.status != SolveStatus::SStationary) continue;
    const auto s = certificate_lp(p, rep.v_star, CertRegime::S);
    if (!s) {
      o.expect(false, "seed " + std::to_string(seed) + " certificate missing");
      continue;
    }
    ++checked;
    const auto k = to_kkt_multipliers(p, rep.v_star, *s);
    const auto back = convert_multipliers(p, rep.v_star, k);
    const double err = std::max({max_abs(back.nu_G - s->nu_G), max_abs(back.nu_H - s->nu_H), max_abs(back.mu - s->mu),
                                 max_abs(back.eta - s->eta)});
    o.expect(check_classical_kkt(p, rep.v_star, k) && err <= 1e-9, "seed " + std::to_string(seed) + " round trip");
    if (rep.global_certified) {
      ++global;
      if (zero_state) ++anchored_global;
      OracleOptions oo;
      oo.stage_constraints = m.domain;
      const auto orc = solve_global_oracle(sys, cost, x0, 2, oo);
      o.expect(orc.status == SolveStatus::Optimal && std::abs(orc.objective - rep.objective) <= 1e-6,
               "seed " + std::to_string(seed) + " global certificate disagrees with oracle");
    }
  }
  o.expect(checked >= 50, "only " + std::to_string(checked) + " instances");
  o.expect(anchored_global > 0, "no certified instance at an equilibrium");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(checked) + " checked, " + std::to_string(global) +
              " globally certified";
  return o;
}

Outcome mssosc() {
  Outcome o;
  const auto p = oracle::small_problem();
  o.expect(!check_mssosc(p, small_point(-1, 0.5, 0.5)), "holds at case 2");
  MpccProblem strict = p;
  strict.P = MatrixXd::Identity(p.n_v(), p.n_v());
  o.expect(check_mssosc(strict, small_point(-1, 0.5, 0.5)), "fails on strictly convex instance");
  return o;
}

Outcome bench() {
  Outcome o;
  const BenchConfig cfg;
  const auto rs = run_bench(cfg);
  int bad = 0;
  for (const auto& r : rs)
    if (r.status == "Error" || r.status == "VerifyFailed") ++bad;
  o.expect(bad == 0, std::to_string(bad) + " crashed or unverified runs");
  const auto g = gap_stats(rs);
  o.expect(g.worst_violation <= 1e-6, "local below oracle by " + std::to_string(g.worst_violation));
  char buf[160];
  for (const auto& [m, f10] : g.fraction_within_10) {
    const double fg = g.fraction_global.at(m);
    std::snprintf(buf, sizeof buf, "%s within10=%.3f global=%.3f", m.c_str(), f10, fg);
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += buf;
    if (f10 < 0.9 || fg < 0.5) o.pass = false;
  }
  const auto prof = performance_profile(rs, cfg.methods);
  bool ok = true;
  for (size_t i = 0; i < prof.size(); ++i)
    for (const auto& m : cfg.methods) {
      const double r = prof[i].rho.at(m);
      ok = ok && r >= 0.0 && r <= 1.0 && (i == 0 || r >= prof[i - 1].rho.at(m));
    }
  o.expect(ok, "profile invariants");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"small-example-cases", 1, small_example_cases},
      {"oracle-and-local-solve", 1e9, oracle_and_local},
      {"transform-equivalence", 30, transform_equivalence},
      {"lcp-suite", 10, lcp_suite},
      {"certificate-round-trip", 10, certificates},
      {"mssosc", 1e9, mssosc},
      {"benchmark", 600, bench},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.budget_s) o.expect(false, "over time budget");
    std::printf("[%s] %zu %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, dt,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
