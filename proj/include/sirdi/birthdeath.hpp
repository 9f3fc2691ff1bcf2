#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sirdi/rng.hpp"

/// Linear birth-death processes Z_{alpha,beta,k}, used to bound the infective
/// count early and late in an outbreak.
namespace sirdi::bd {

struct BdParams {
  double alpha = 0.0;  // per-individual birth rate
  double beta = 1.0;   // per-individual death rate
  std::int64_t k = 1;  // initial count

  double a() const { return alpha / beta; }
  void validate() const;
};

enum class BdStatus { HitUpper, Extinct, BudgetExceeded };

struct BdOptions {
  /// Births after which the run is abandoned.
  std::int64_t birth_budget = 10'000'000;
  /// Population at which an extinction-only run (upper = 0) is abandoned. 0 picks
  /// the level where extinction has probability below 1e-16 when a > 1.
  std::int64_t population_cap = 0;
  /// Stop once total births reach this level, recording the time (the hat-tau hitting time).
  std::optional<std::int64_t> births_level;
};

struct BdOutcome {
  BdStatus status = BdStatus::BudgetExceeded;
  std::optional<double> hit_time_x;      // first time Z >= upper
  std::optional<double> extinct_time;    // first time Z = 0
  std::optional<double> births_hit_time; // first time B >= births_level
  std::int64_t total_births = 0;
  std::int64_t final_count = 0;

  /// min(hit, extinct) when the run was decided.
  std::optional<double> decision_time() const;
};

/// Exact event-driven run until Z reaches `upper`, Z hits 0, the births level is
/// reached (status HitUpper) or a budget runs out. upper = 0 means no upper level.
BdOutcome simulate_bd(const BdParams& p, std::int64_t upper, Rng& rng, const BdOptions& opts = {});
BdOutcome simulate_bd(const BdParams& p, std::int64_t upper, std::uint64_t seed,
                      const BdOptions& opts = {});

/// Gambler's-ruin probability of reaching m before 0 from k, with up/down odds a.
double ladder_hit_probability(double a, std::int64_t k, std::int64_t m);

struct LemmaConfig {
  double a_sub = 0.5;
  double a_super = 2.0;
  std::vector<double> n_grid = {1e3, 1e4, 1e5, 1e6};
  /// beta_n = beta_scale * (ln n)^2.
  double beta_scale = 1.0;
  std::int64_t reps = 10'000;
  /// c in hat-tau(c n) for the cumulative-births check.
  double births_fraction = 0.01;
  std::int64_t births_reps = 200;
  /// Extinction-only runs (no upper level) for the survival frequency and the
  /// subcritical total-progeny mean.
  std::int64_t survival_reps = 100'000;
  std::int64_t progeny_reps = 100'000;
  /// Runs per (a, k, m) point of the ladder-probability grid.
  std::int64_t ladder_reps = 10'000;
  double level = 0.99;
  std::uint64_t seed = 1;
};

/// One line of the report, CSV `check,n,estimate,ci_lo,ci_hi,target`.
struct LemmaRow {
  std::string check;
  double n = 0.0;
  double estimate = 0.0;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
  double target = 0.0;
  bool pass = true;
};

struct LemmaReport {
  std::vector<LemmaRow> rows;
  bool all_pass() const;
  std::vector<std::string> failures() const;
};

/// Monte Carlo checks along n with beta_n = scale (ln n)^2 and level ceil(ln n):
///  sub_reach     (a<1)  P(reach ceil(ln n) from 1) -> 0, matched to the ladder probability
///  super_hit     (a>1)  P(hit before extinction) -> 1 - 1/a
///  super_decide  (a>1)  median min(hit, extinction) time decreases in n
///  super_births  (a>1)  P(births before decision < n^{1/3}) -> 1
///  births_level  (a>1)  median time for ceil(ln n) ancestors to produce c n births, against
///                       ln(1 + c n (a - 1) / (a ceil(ln n))) / ((a - 1) beta_n)
/// plus, independent of n: survival (a>1, no upper level) against 1 - 1/a, subcritical mean
/// total progeny against a/(1-a) within 3 SE, and the ladder probability on
/// {a_sub, a_super} x {1, 3} x {10, 20}.
LemmaReport verify_lemma_suite(const LemmaConfig& cfg);

void write_report_csv(std::ostream& os, const LemmaReport& report);

}  // namespace sirdi::bd
