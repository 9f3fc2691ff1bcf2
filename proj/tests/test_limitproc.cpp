#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sirdi/analytic.hpp"
#include "sirdi/error.hpp"
#include "sirdi/limitproc.hpp"
#include "sirdi/stats.hpp"

using namespace sirdi;
using namespace sirdi::limit;

namespace {

ModelParams params(double kappa) {
  ModelParams p;
  p.kappa = kappa;
  return p;
}

// Dense-grid evaluation of a path functional, as an oracle for the exact versions.
std::optional<double> grid_first_passage(const LimitPath& path, double a, double dt) {
  const bool up = path.s_start() <= a;
  for (double t = 0.0; t <= path.horizon; t += dt) {
    const double v = path.value_at(t);
    if (up ? v >= a : v <= a) return t;
  }
  return std::nullopt;
}

double grid_occupancy(const LimitPath& path, double a, double t_star, int steps) {
  const double dt = t_star / steps;
  double acc = 0.0;
  for (int k = 0; k < steps; ++k) acc += path.value_at((k + 0.5) * dt) <= a ? dt : 0.0;
  return acc;
}

}  // namespace

TEST_CASE("no importation: one monotone segment") {
  const auto path = simulate_thinned(params(0.0), 0.5, 100.0, std::uint64_t{1});
  CHECK(path.jumps.empty());
  REQUIRE(path.segments.size() == 1);
  double prev = 0.0;
  for (double t = 0.0; t <= 100.0; t += 1.0) {
    CHECK(path.value_at(t) > prev);
    prev = path.value_at(t);
  }
  CHECK(path.value_at(100.0) == doctest::Approx(analytic::growth(0.5, 100.0, path.mu)));
}

TEST_CASE("jumps start above 1/R0 and land at pre exp(-R0 x)") {
  const ModelParams p = params(20.0);
  const auto path = simulate_thinned(p, 0.5, 1000.0, std::uint64_t{2});
  REQUIRE(path.jumps.size() > 10);
  for (const auto& j : path.jumps) {
    CHECK(j.pre_value > 0.5);
    CHECK(j.post_value < 0.5);
    CHECK(j.post_value == doctest::Approx(j.pre_value * std::exp(-p.r0 * j.jump_size)).epsilon(1e-12));
    CHECK(path.value_at(j.time) == j.post_value);
  }
}

TEST_CASE("same seed, same path") {
  const auto a = simulate_thinned(params(3.0), 0.5, 500.0, std::uint64_t{9});
  const auto b = simulate_thinned(params(3.0), 0.5, 500.0, std::uint64_t{9});
  REQUIRE(a.jumps.size() == b.jumps.size());
  for (std::size_t k = 0; k < a.jumps.size(); ++k) CHECK(a.jumps[k].time == b.jumps[k].time);
}

TEST_CASE("cycles: extracted from a path and simulated directly") {
  const ModelParams p = params(3.0);
  const auto path = simulate_thinned(p, 0.5, 5000.0, std::uint64_t{3});
  const auto cycles = extract_cycles(path);
  REQUIRE(!cycles.empty());
  for (const auto& c : cycles) {
    CHECK(c.t_star == doctest::Approx(analytic::cycle_length(c.x, p.mu, p.r0)).epsilon(1e-9));
    CHECK(c.t_jump == doctest::Approx(analytic::jump_time_of_size(p, c.x)).epsilon(1e-9));
  }
  const auto direct = simulate_cycles(p, 20000, std::uint64_t{4});
  std::vector<double> xs;
  for (const auto& c : direct) xs.push_back(c.x);
  CHECK(stats::ks_distance(stats::Ecdf(xs), [&](double x) { return analytic::jump_size_cdf(p, x); }) <
        stats::ks_threshold(xs.size()));
}

TEST_CASE("thinned and cycle constructions give the same jump sizes") {
  const ModelParams p = params(3.0);
  Rng rng(5);
  std::vector<double> thinned;
  while (thinned.size() < 10000) {
    const auto path = simulate_thinned(p, 0.5, 2000.0, rng);
    if (!path.jumps.empty()) thinned.push_back(path.jumps.front().jump_size);
  }
  std::vector<double> cycles;
  for (const auto& c : simulate_cycles(p, 10000, std::uint64_t{6})) cycles.push_back(c.x);
  CHECK(stats::ks_two_sample(stats::Ecdf(thinned), stats::Ecdf(cycles)) <
        stats::ks_threshold_two_sample(thinned.size(), cycles.size()));
}

TEST_CASE("first passage and occupancy against dense grids") {
  const auto path = simulate_thinned(params(20.0), 0.5, 200.0, std::uint64_t{7});
  for (double a : {0.3, 0.6, 0.75}) {
    const auto exact = first_passage(path, a);
    const auto grid = grid_first_passage(path, a, 1e-3);
    REQUIRE(exact.has_value() == grid.has_value());
    if (exact) CHECK(std::abs(*exact - *grid) <= 1e-3 + 1e-9);
    const double occ = occupancy(path, a, 150.0);
    CHECK(std::abs(occ - grid_occupancy(path, a, 150.0, 400000)) < 0.01);
  }
  CHECK(first_passage(path, 0.5) == 0.0);
  CHECK_THROWS_AS(occupancy(path, 0.5, 201.0), DomainError);
  // Downward: from above, the first jump below a.
  const auto high = simulate_thinned(params(20.0), 0.9, 300.0, std::uint64_t{8});
  const auto down = first_passage(high, 0.6);
  REQUIRE(down.has_value());
  CHECK(high.value_at(*down) <= 0.6);
  CHECK(high.value_at(*down - 1e-9) > 0.6);
}

TEST_CASE("occupancy histogram carries the whole horizon") {
  const auto path = simulate_thinned(params(3.0), 0.5, 1000.0, std::uint64_t{10});
  const auto raw = occupancy_histogram_raw(path, 50);
  CHECK(raw.total() == doctest::Approx(1000.0).epsilon(1e-12));
  for (int b = 10; b < 50; b += 7) {
    const double a = b / 50.0;
    double below = 0.0;
    for (int j = 0; j < b; ++j) below += raw.masses()[static_cast<std::size_t>(j)];
    CHECK(below == doctest::Approx(occupancy(path, a, 1000.0)).epsilon(1e-9));
  }
  CHECK(occupancy_histogram(path, 50).total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("CSV exports") {
  const auto path = simulate_thinned(params(20.0), 0.5, 100.0, std::uint64_t{11});
  std::ostringstream ps, cs;
  write_path_csv(ps, path, 1.0);
  write_cycles_csv(cs, extract_cycles(path));
  CHECK(ps.str().rfind("t,s\n", 0) == 0);
  CHECK(cs.str().rfind("t_jump,x,t_star\n", 0) == 0);
  std::size_t rows = 0;
  for (char c : ps.str()) rows += c == '\n';
  CHECK(rows == 1 + 101 + 2 * path.jumps.size());
}

TEST_CASE("limit process needs R0 > 1") {
  ModelParams p = params(3.0);
  p.r0 = 0.9;
  CHECK_THROWS_AS(simulate_thinned(p, 0.5, 10.0, std::uint64_t{1}), ValidationError);
}
