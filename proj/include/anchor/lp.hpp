#pragma once

#include <string>
#include <vector>

namespace anchor {

// Predicted TVD for every (computer, map) pair. Scale-free: any positive
// rescaling of values leaves the optimal fractions unchanged.
struct TvdMatrix {
  std::vector<std::string> computers;             // k >= 2 device names
  std::vector<std::string> maps;                  // m >= 1 map identifiers
  std::vector<std::vector<double>> values;        // k x m

  int k() const { return static_cast<int>(computers.size()); }
  int m() const { return static_cast<int>(maps.size()); }
  void validate() const;
};

struct LpConfig {
  double epsilon = 0.1;    // allowed pairwise ratio gap between expected TVDs
  int target_computer = 0;
  int max_retries = 4;     // epsilon doublings on infeasibility
};

// min c.x  s.t.  a_eq.x = b_eq,  a_ub.x <= b_ub,  lo <= x <= hi.
// Variables are computer-major, map-minor: x[i*m + j] is the shot fraction
// computer i gives map j. Equalities make each computer's fractions sum to 1;
// inequalities bound every ordered pair's expected-TVD ratio by (1+epsilon),
// two rows per pair. Entries are floored at 1e-6 so ratios stay defined.
struct LpProblem {
  std::vector<double> c;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  double lo = 0.0, hi = 1.0;
};

LpProblem build_lp(const TvdMatrix& t, const LpConfig& cfg);

// Dense two-phase simplex with Bland's rule; optimal within 1e-9 on the
// problem sizes this project produces. feasible == false leaves x empty.
// Right-hand sides must be nonnegative (every shot problem's are; negative
// ones throw).
struct LpSolution {
  bool feasible = false;
  std::vector<double> x;
  double objective = 0;
};
LpSolution solve_lp(const LpProblem& p);

// Largest-remainder apportionment of total into integer shot counts: floor
// every share, then hand the remaining shots to the largest fractional
// remainders (ties to the lower index). Preserves the total exactly.
std::vector<long long> allocate_shots(const std::vector<double>& fractions, long long total);

struct ShotPlan {
  std::vector<std::vector<double>> fractions;  // k x m
  std::vector<long long> shots;                // target computer's row, sums to total
  std::vector<double> equalized_tvd;           // per computer, from the input matrix
  double objective = 0;
  double epsilon_used = 0;
  int target_computer = 0;
};

// build + solve + allocate. Infeasible problems retry with epsilon doubled
// (from 0.05 when epsilon is 0) up to cfg.max_retries times before throwing.
ShotPlan plan(const TvdMatrix& t, const LpConfig& cfg, long long total_shots);

}  // namespace anchor
