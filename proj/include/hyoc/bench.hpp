#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hyoc/pwa_dc.hpp"
#include "hyoc/types.hpp"

namespace hyoc {

struct BenchConfig {
  int n_systems = 10;
  std::vector<std::pair<int, int>> dims{{1, 1}, {1, 1}, {2, 1}};  ///< (n_x, n_u), cycled over systems
  int pieces_min = 2;
  int pieces_max = 3;
  std::vector<int> horizons{2, 3, 4};
  int n_states = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"oracle", "local-sparse", "local-compact"};
  double time_limit_s = 20.0;
  int starts = 20;
  bool include_example = true;
  double x0_radius = 3.0;  ///< x0 drawn uniformly from [-r, r]^n_x intersected with the domain

  void validate() const;
};

struct BenchRecord {
  int system = 0;
  int N = 0;
  VectorXd x0;
  std::string method;
  std::string status;
  double time_s = 0.0;
  double objective = 0.0;
  bool s_stationary = false;
  bool global_cert = false;

  bool same_except_time(const BenchRecord& o) const;
};

/// The example system max{-(x+u+2), -1} - 0 on the whole plane.
PwaDcSystem example_system();

/// Systems in benchmark order; the example system (when included) is last.
std::vector<PwaDcSystem> bench_systems(const BenchConfig& cfg);

std::vector<BenchRecord> run_bench(const BenchConfig& cfg);

std::string emit_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_csv(const std::string& text);

struct ProfilePoint {
  double tau = 1.0;
  std::map<std::string, double> rho;
};

/// Dolan-More profile evaluated at every distinct finite ratio; instances are (system, N, x0).
std::vector<ProfilePoint> performance_profile(const std::vector<BenchRecord>& records,
                                              const std::vector<std::string>& methods);

bool record_solved(const BenchRecord& r);

struct InstanceGap {
  int system = 0;
  int N = 0;
  VectorXd x0;
  std::string method;
  double gap = 0.0;       ///< percent, or absolute difference when absolute is set
  bool absolute = false;  ///< oracle objective below 1e-12 in magnitude
  bool solved = false;
};

struct GapSummary {
  std::vector<InstanceGap> gaps;
  std::map<std::string, double> fraction_global;
  std::map<std::string, double> fraction_within_10;
  std::map<std::string, int> instances;
  double worst_violation = 0.0;  ///< max over records of J_oracle - J_local
};

GapSummary gap_stats(const std::vector<BenchRecord>& records);

}  // namespace hyoc
