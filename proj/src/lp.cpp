#include "anchor/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace anchor {

void TvdMatrix::validate() const {
  if (k() < 2) throw std::invalid_argument("TvdMatrix needs at least 2 computers");
  if (m() < 1) throw std::invalid_argument("TvdMatrix needs at least 1 map");
  if (static_cast<int>(values.size()) != k())
    throw std::invalid_argument("TvdMatrix row count must match computers");
  for (const auto& row : values) {
    if (static_cast<int>(row.size()) != m())
      throw std::invalid_argument("TvdMatrix column count must match maps");
    for (double v : row)
      if (!(v >= 0) || !std::isfinite(v))
        throw std::invalid_argument("TvdMatrix entries must be finite and non-negative");
  }
}

namespace {

constexpr double kTvdFloor = 1e-6;

}  // namespace

LpProblem build_lp(const TvdMatrix& t, const LpConfig& cfg) {
  t.validate();
  if (cfg.epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
  int k = t.k(), m = t.m();
  int n = k * m;
  auto entry = [&](int i, int j) { return std::max(t.values[i][j], kTvdFloor); };

  LpProblem p;
  p.c.resize(n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) p.c[i * m + j] = entry(i, j);

  p.a_eq.assign(k, std::vector<double>(n, 0.0));
  p.b_eq.assign(k, 1.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) p.a_eq[i][i * m + j] = 1.0;

  // Two rows per ordered pair (i, j), i != j:
  //   TVD_j - (1+eps) * TVD_i <= 0
  //  -TVD_j + TVD_i / (1+eps) <= 0
  double scale = 1.0 + cfg.epsilon;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      std::vector<double> r1(n, 0.0), r2(n, 0.0);
      for (int l = 0; l < m; ++l) {
        r1[j * m + l] = entry(j, l);
        r1[i * m + l] = -scale * entry(i, l);
        r2[j * m + l] = -entry(j, l);
        r2[i * m + l] = entry(i, l) / scale;
      }
      p.a_ub.push_back(std::move(r1));
      p.a_ub.push_back(std::move(r2));
    }
  }
  p.b_ub.assign(p.a_ub.size(), 0.0);
  return p;
}

namespace {

constexpr double kEps = 1e-10;

// Dense tableau simplex over rows of [A | b] with an explicit basis. Bland's
// rule (lowest eligible index enters, lowest-index basic among minimal
// ratios leaves) guarantees termination.
struct Tableau {
  int rows = 0, cols = 0;                 // cols counts structural+slack+artificial
  std::vector<std::vector<double>> a;     // rows x cols
  std::vector<double> b;
  std::vector<int> basis;                 // basic column per row

  void pivot(int r, int c) {
    double inv = 1.0 / a[r][c];
    for (int j = 0; j < cols; ++j) a[r][j] *= inv;
    b[r] *= inv;
    a[r][c] = 1.0;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0.0) continue;
      double f = a[i][c];
      for (int j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
      a[i][c] = 0.0;
      b[i] -= f * b[r];
    }
    basis[r] = c;
  }

  // Minimizes obj over the current feasible basis; returns false if unbounded.
  bool minimize(std::vector<double>& obj, int usable_cols) {
    for (;;) {
      // reduced costs: obj after eliminating basic columns
      std::vector<double> reduced = obj;
      double shift = 0;
      for (int i = 0; i < rows; ++i) {
        double cb = obj[basis[i]];
        if (cb == 0.0) continue;
        for (int j = 0; j < usable_cols; ++j) reduced[j] -= cb * a[i][j];
        shift += cb * b[i];
      }
      (void)shift;
      int enter = -1;
      for (int j = 0; j < usable_cols; ++j)
        if (reduced[j] < -kEps) {
          enter = j;
          break;  // Bland: lowest index
        }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows; ++i) {
        if (a[i][enter] > kEps) {
          double ratio = b[i] / a[i][enter];
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
  int n = static_cast<int>(p.c.size());
  if (n == 0) throw std::invalid_argument("solve_lp: empty problem");
  for (const auto& row : p.a_eq)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("solve_lp: a_eq width mismatch");
  for (const auto& row : p.a_ub)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("solve_lp: a_ub width mismatch");
  if (!(p.hi > p.lo) || p.lo != 0.0)
    throw std::invalid_argument("solve_lp: bounds must be [0, hi]");

  int n_eq = static_cast<int>(p.a_eq.size());
  int n_ub = static_cast<int>(p.a_ub.size());
  // Upper bounds become explicit rows x_j + s = hi; all rows then get either
  // a slack (<=) or an artificial (=) starter column.
  int rows = n_eq + n_ub + n;
  int n_slack = n_ub + n;
  int cols = n + n_slack + n_eq;  // artificials last

  Tableau t;
  t.rows = rows;
  t.cols = cols;
  t.a.assign(rows, std::vector<double>(cols, 0.0));
  t.b.assign(rows, 0.0);
  t.basis.assign(rows, -1);

  int r = 0;
  int slack = n;
  // inequality rows (b_ub must be >= 0 for the slack basis; ours are 0 or hi)
  for (int i = 0; i < n_ub; ++i, ++r) {
    if (p.b_ub[i] < 0) throw std::invalid_argument("solve_lp: negative b_ub unsupported");
    for (int j = 0; j < n; ++j) t.a[r][j] = p.a_ub[i][j];
    t.b[r] = p.b_ub[i];
    t.a[r][slack] = 1.0;
    t.basis[r] = slack++;
  }
  for (int j = 0; j < n; ++j, ++r) {  // bound rows
    t.a[r][j] = 1.0;
    t.b[r] = p.hi;
    t.a[r][slack] = 1.0;
    t.basis[r] = slack++;
  }
  int artificial = n + n_slack;
  for (int i = 0; i < n_eq; ++i, ++r) {
    double sign = p.b_eq[i] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) t.a[r][j] = sign * p.a_eq[i][j];
    t.b[r] = sign * p.b_eq[i];
    t.a[r][artificial] = 1.0;
    t.basis[r] = artificial++;
  }

  // Phase 1: drive the artificials to zero.
  std::vector<double> phase1(cols, 0.0);
  for (int j = n + n_slack; j < cols; ++j) phase1[j] = 1.0;
  if (!t.minimize(phase1, cols))
    throw std::runtime_error("solve_lp: phase-1 unbounded (internal error)");
  double infeas = 0;
  for (int i = 0; i < rows; ++i)
    if (t.basis[i] >= n + n_slack) infeas += t.b[i];
  if (infeas > 1e-8) return {};  // infeasible

  // Pivot leftover (degenerate) artificials out of the basis where possible.
  for (int i = 0; i < rows; ++i) {
    if (t.basis[i] < n + n_slack) continue;
    int c = -1;
    for (int j = 0; j < n + n_slack; ++j)
      if (std::abs(t.a[i][j]) > kEps) {
        c = j;
        break;
      }
    if (c >= 0) t.pivot(i, c);
    // else: the row is all zeros — redundant constraint, harmless to keep
  }

  // Phase 2 over structural + slack columns only.
  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = p.c[j];
  if (!t.minimize(phase2, n + n_slack))
    throw std::runtime_error("solve_lp: objective unbounded");

  LpSolution sol;
  sol.feasible = true;
  sol.x.assign(n, 0.0);
  for (int i = 0; i < rows; ++i)
    if (t.basis[i] < n) sol.x[t.basis[i]] = t.b[i];
  for (double& v : sol.x) v = std::clamp(v, p.lo, p.hi);
  sol.objective = std::inner_product(sol.x.begin(), sol.x.end(), p.c.begin(), 0.0);
  return sol;
}

std::vector<long long> allocate_shots(const std::vector<double>& fractions, long long total) {
  if (total < 0) throw std::invalid_argument("allocate_shots: negative total");
  std::vector<long long> shots(fractions.size(), 0);
  std::vector<std::pair<double, size_t>> remainders;
  long long assigned = 0;
  for (size_t j = 0; j < fractions.size(); ++j) {
    double share = fractions[j] * static_cast<double>(total);
    if (share < 0) share = 0;
    long long base = static_cast<long long>(std::floor(share));
    shots[j] = base;
    assigned += base;
    remainders.emplace_back(share - static_cast<double>(base), j);
  }
  long long leftover = total - assigned;
  // largest remainder first; ties to the lower index
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t i = 0; leftover > 0 && i < remainders.size(); ++i, --leftover)
    shots[remainders[i].second] += 1;
  if (leftover > 0) {  // fractions summed below 1: give the rest to entry 0
    if (shots.empty()) throw std::invalid_argument("allocate_shots: no fractions");
    shots[0] += leftover;
  }
  return shots;
}

ShotPlan plan(const TvdMatrix& t, const LpConfig& cfg, long long total_shots) {
  t.validate();
  if (cfg.target_computer < 0 || cfg.target_computer >= t.k())
    throw std::invalid_argument("plan: target computer out of range");
  if (total_shots <= 0) throw std::invalid_argument("plan: total_shots must be positive");

  int k = t.k(), m = t.m();
  double eps = cfg.epsilon;
  LpSolution sol;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    LpConfig round = cfg;
    round.epsilon = eps;
    sol = solve_lp(build_lp(t, round));
    if (sol.feasible) break;
    if (attempt == cfg.max_retries)
      throw std::runtime_error("plan: LP infeasible after epsilon escalation to " +
                               std::to_string(eps));
    eps = eps == 0.0 ? 0.05 : eps * 2.0;
  }

  ShotPlan out;
  out.epsilon_used = eps;
  out.target_computer = cfg.target_computer;
  out.objective = sol.objective;
  out.fractions.assign(k, std::vector<double>(m, 0.0));
  out.equalized_tvd.assign(k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) {
      double f = sol.x[i * m + j];
      out.fractions[i][j] = f;
      out.equalized_tvd[i] += f * t.values[i][j];
    }
  out.shots = allocate_shots(out.fractions[cfg.target_computer], total_shots);
  return out;
}

}  // namespace anchor
