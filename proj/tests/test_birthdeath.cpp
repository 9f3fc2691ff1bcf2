#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "sirdi/birthdeath.hpp"
#include "sirdi/error.hpp"
#include "sirdi/stats.hpp"

using namespace sirdi;
using namespace sirdi::bd;

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(simulate_bd({-1.0, 1.0, 1}, 0, std::uint64_t{1}), ValidationError);
  CHECK_THROWS_AS(simulate_bd({1.0, 0.0, 1}, 0, std::uint64_t{1}), ValidationError);
  CHECK_THROWS_AS(simulate_bd({1.0, 1.0, 0}, 0, std::uint64_t{1}), ValidationError);
  CHECK_THROWS_AS(simulate_bd({1.0, 1.0, 5}, 5, std::uint64_t{1}), ValidationError);
}

TEST_CASE("pure death: extinction time is the max of k exponentials") {
  const BdParams p{0.0, 2.0, 4};
  Rng rng(1);
  std::vector<double> times;
  for (int r = 0; r < 20000; ++r) {
    const auto o = simulate_bd(p, 0, rng);
    REQUIRE(o.status == BdStatus::Extinct);
    CHECK(o.total_births == 0);
    times.push_back(*o.extinct_time);
  }
  auto cdf = [](double t) { return t <= 0 ? 0.0 : std::pow(1.0 - std::exp(-2.0 * t), 4); };
  CHECK(stats::ks_distance(stats::Ecdf(times), cdf) < stats::ks_threshold(times.size()));
}

TEST_CASE("ladder probability") {
  CHECK(ladder_hit_probability(2.0, 1, 10) == doctest::Approx(0.5 / (1 - std::pow(0.5, 10))));
  CHECK(ladder_hit_probability(0.5, 3, 20) == doctest::Approx((1 - 8.0) / (1 - std::pow(2.0, 20))));
  CHECK(ladder_hit_probability(1.0, 3, 12) == doctest::Approx(0.25));
  CHECK(ladder_hit_probability(2.0, 0, 5) == 0.0);
  CHECK(ladder_hit_probability(2.0, 5, 5) == 1.0);
  // Satisfies p_k = (a p_{k+1} + p_{k-1}) / (1 + a).
  for (double a : {0.5, 2.0, 3.0}) {
    for (int k = 1; k < 9; ++k) {
      const double lhs = ladder_hit_probability(a, k, 9);
      const double rhs = (a * ladder_hit_probability(a, k + 1, 9) + ladder_hit_probability(a, k - 1, 9)) / (1 + a);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("simulated ladder frequencies match") {
  for (double a : {0.5, 2.0}) {
    for (std::int64_t k : {1, 3}) {
      const BdParams p{a, 1.0, k};
      Rng rng(static_cast<std::uint64_t>(10 * a + k));
      const int reps = 20000;
      int hits = 0;
      for (int r = 0; r < reps; ++r) hits += simulate_bd(p, 10, rng).status == BdStatus::HitUpper;
      const auto [lo, hi] = stats::wilson_interval(hits, reps, 0.99);
      const double target = ladder_hit_probability(a, k, 10);
      CHECK(lo <= target);
      CHECK(target <= hi);
    }
  }
}

TEST_CASE("time change: (alpha, beta) at t behaves like (a, 1) at beta t") {
  Rng r1(5), r2(6);
  std::vector<double> scaled, unit;
  for (int r = 0; r < 5000; ++r) {
    const auto o = simulate_bd({6.0, 3.0, 2}, 12, r1);
    scaled.push_back(3.0 * o.decision_time().value());
    unit.push_back(simulate_bd({2.0, 1.0, 2}, 12, r2).decision_time().value());
  }
  CHECK(stats::ks_two_sample(stats::Ecdf(scaled), stats::Ecdf(unit)) <
        stats::ks_threshold_two_sample(scaled.size(), unit.size()));
}

TEST_CASE("subcritical total progeny has mean a / (1 - a)") {
  Rng rng(7);
  std::vector<double> births;
  for (int r = 0; r < 100000; ++r) births.push_back(static_cast<double>(simulate_bd({0.5, 1.0, 1}, 0, rng).total_births));
  const auto ms = stats::mean_and_se(births);
  CHECK(std::abs(ms.mean - 1.0) < 3.0 * ms.se);
}

TEST_CASE("budgets and births level") {
  BdOptions tight;
  tight.birth_budget = 50;
  tight.population_cap = 1'000'000;
  const auto o = simulate_bd({3.0, 1.0, 20}, 0, std::uint64_t{3}, tight);
  CHECK(o.status == BdStatus::BudgetExceeded);
  CHECK(o.total_births == 50);

  // Default cap: supercritical extinction-only runs stop once extinction is negligible.
  Rng rng(8);
  for (int r = 0; r < 100; ++r) {
    const auto s = simulate_bd({2.0, 1.0, 1}, 0, rng);
    CHECK((s.status == BdStatus::Extinct || s.final_count >= 54));
  }

  BdOptions level;
  level.births_level = 500;
  level.population_cap = std::numeric_limits<std::int64_t>::max();
  const auto l = simulate_bd({2.0, 1.0, 10}, 0, std::uint64_t{9}, level);
  REQUIRE(l.births_hit_time.has_value());
  CHECK(l.total_births == 500);
  CHECK(l.status == BdStatus::HitUpper);
}

TEST_CASE("lemma suite on a reduced grid") {
  LemmaConfig cfg;
  cfg.n_grid = {1e4, 1e5};
  cfg.reps = 2000;
  cfg.survival_reps = 5000;
  cfg.progeny_reps = 5000;
  cfg.ladder_reps = 2000;
  cfg.births_reps = 100;
  const auto rep = verify_lemma_suite(cfg);
  CHECK(rep.all_pass());
  CHECK(rep.failures().empty());
  std::ostringstream os;
  write_report_csv(os, rep);
  CHECK(os.str().rfind("check,n,estimate,ci_lo,ci_hi,target\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : os.str()) lines += c == '\n';
  CHECK(lines == rep.rows.size() + 1);
}
