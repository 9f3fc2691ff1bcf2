#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sirdi/analytic.hpp"
#include "sirdi/error.hpp"
#include "sirdi/limitproc.hpp"
#include "sirdi/rng.hpp"
#include "sirdi/stats.hpp"

using namespace sirdi;
using namespace sirdi::analytic;

namespace {

ModelParams params(double kappa) {
  ModelParams p;
  p.kappa = kappa;
  return p;
}

// Plain bisection on 1 - t - exp(-r0 s t), kept separate from the library solver.
double tau_oracle(double r0, double s) {
  double lo = 1e-12, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - mid - std::exp(-r0 * s * mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Classical RK4 for ds = -r0 s i, di = r0 s i - i until i is negligible.
double sir_final_size_ode(double s0, double i0, double r0) {
  double s = s0, i = i0;
  const double h = 0.01;
  auto fs = [&](double s_, double i_) { return -r0 * s_ * i_; };
  auto fi = [&](double s_, double i_) { return r0 * s_ * i_ - i_; };
  for (int step = 0; step < 2'000'000 && (i > 1e-15 || step < 1000); ++step) {
    const double k1s = fs(s, i), k1i = fi(s, i);
    const double k2s = fs(s + h / 2 * k1s, i + h / 2 * k1i), k2i = fi(s + h / 2 * k1s, i + h / 2 * k1i);
    const double k3s = fs(s + h / 2 * k2s, i + h / 2 * k2i), k3i = fi(s + h / 2 * k2s, i + h / 2 * k2i);
    const double k4s = fs(s + h * k3s, i + h * k3i), k4i = fi(s + h * k3s, i + h * k3i);
    s += h / 6 * (k1s + 2 * k2s + 2 * k3s + k4s);
    i += h / 6 * (k1i + 2 * k2i + 2 * k3i + k4i);
  }
  return s;
}

}  // namespace

TEST_CASE("tau at s = 1 matches the quoted 1 - tau(1) = 0.2032") {
  CHECK(std::abs(solve_tau(2.0, 1.0) - 0.7968) < 5e-4);
  CHECK(tau_one(2.0) == solve_tau(2.0, 1.0));
}

TEST_CASE("tau agrees with an independent bisection") {
  CHECK(solve_tau(2.0, 0.75) == doctest::Approx(tau_oracle(2.0, 0.75)).epsilon(1e-12));
  CHECK(solve_tau(2.0, 0.75) == doctest::Approx(0.5828116).epsilon(1e-6));
  for (double r0 : {1.2, 2.0, 5.0, 15.0}) {
    for (double s : {0.9, 1.0}) {
      if (r0 * s <= 1.0) continue;
      CHECK(solve_tau(r0, s) == doctest::Approx(tau_oracle(r0, s)).epsilon(1e-10));
    }
  }
  // Barely supercritical: tau ~ 2 (r0 s - 1) / (r0 s)^2.
  const double eps = 1e-6;
  CHECK(solve_tau(1.0 + eps, 1.0) == doctest::Approx(2 * eps).epsilon(1e-5));
}

TEST_CASE("tau is undefined at or below criticality") {
  CHECK_THROWS_AS(solve_tau(2.0, 0.5), SubcriticalDomain);
  CHECK_THROWS_AS(solve_tau(0.8, 1.0), SubcriticalDomain);
  CHECK_THROWS_AS(tau_one(1.0), DomainError);
}

TEST_CASE("growth solves S' = mu (1 - S)") {
  const double mu = 1.0 / 75.0;
  double s = 0.3;
  const double h = 0.01;
  for (int k = 0; k < 5000; ++k) {
    auto f = [&](double v) { return mu * (1.0 - v); };
    const double k1 = f(s), k2 = f(s + h / 2 * k1), k3 = f(s + h / 2 * k2), k4 = f(s + h * k3);
    s += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  CHECK(growth(0.3, 50.0, mu) == doctest::Approx(s).epsilon(1e-12));
  CHECK(growth(0.3, 0.0, mu) == 0.3);
  CHECK(growth_time(0.3, growth(0.3, 17.0, mu), mu) == doctest::Approx(17.0).epsilon(1e-10));
}

TEST_CASE("jump-time law equals the integrated importation hazard") {
  for (double kappa : {1.0, 3.0, 100.0}) {
    const ModelParams p = params(kappa);
    auto hazard = [&](double u) {
      const double s = growth(1.0 / p.r0, u, p.mu);
      return p.mu * p.kappa * std::max(1.0 - 1.0 / (p.r0 * s), 0.0);
    };
    for (double t : {0.5, 10.0, 75.0, 400.0}) {
      // Composite Simpson with many panels.
      const int m = 20000;
      const double h = t / m;
      double acc = hazard(0.0) + hazard(t);
      for (int j = 1; j < m; ++j) acc += (j % 2 ? 4.0 : 2.0) * hazard(j * h);
      const double log_surv = -acc * h / 3.0;
      CHECK(jump_time_log_survival(p, t) == doctest::Approx(log_surv).epsilon(1e-9));
    }
  }
  CHECK(jump_time_cdf(params(1.0), 0.0) == 0.0);
  CHECK(jump_time_cdf(params(1.0), 75.0) == doctest::Approx(0.22513).epsilon(1e-4));
}

TEST_CASE("jump-time density is the derivative of the cdf") {
  const ModelParams p = params(3.0);
  for (double t : {1.0, 20.0, 90.0}) {
    const double h = 1e-4;
    const double slope = (jump_time_cdf(p, t + h) - jump_time_cdf(p, t - h)) / (2 * h);
    CHECK(jump_time_density(p, t) == doctest::Approx(slope).epsilon(1e-6));
  }
}

TEST_CASE("jump-time quantile inverts the cdf") {
  const ModelParams p = params(3.0);
  for (double u : {0.0, 1e-6, 0.1, 0.5, 0.9, 0.999999}) {
    CHECK(std::abs(jump_time_cdf(p, jump_time_quantile(p, u)) - u) < 1e-10);
  }
}

TEST_CASE("jump-size cdf matches a thinning Monte Carlo") {
  // Renewal at 1/R0, importations at rate mu kappa, each accepted with
  // probability 1 - 1/(R0 s); X = S(T-) tau(S(T-)).
  const ModelParams p = params(3.0);
  Rng rng(20240);
  const int n = 1'000'000;
  int below = 0;
  for (int k = 0; k < n; ++k) {
    double t = 0.0;
    while (true) {
      t += rng.exponential(p.mu * p.kappa);
      const double s = growth(1.0 / p.r0, t, p.mu);
      if (rng.uniform() < 1.0 - 1.0 / (p.r0 * s)) {
        if (s * solve_tau(p.r0, s) <= 0.4) ++below;
        break;
      }
    }
  }
  const double est = static_cast<double>(below) / n;
  const double f = jump_size_cdf(p, 0.4);
  CHECK(std::abs(est - f) < 5.0 * std::sqrt(f * (1 - f) / n));
}

TEST_CASE("jump-size cdf edges and the small-size series") {
  const ModelParams p = params(3.0);
  CHECK(jump_size_cdf(p, 0.0) == 0.0);
  CHECK(jump_size_cdf(p, tau_one(2.0)) == 1.0);
  // Continuity across the switch to the series expansion near x = 0.
  const double x = 1e-3 / p.r0;
  CHECK(jump_size_cdf(p, x * (1 - 1e-9)) == doctest::Approx(jump_size_cdf(p, x * (1 + 1e-9))).epsilon(1e-7));
  CHECK(jump_size_cdf(p, 1e-8) < 1e-10);
}

TEST_CASE("pre- and post-jump levels") {
  const double r0 = 2.0;
  for (double s : {0.55, 0.7, 0.95, 0.999}) {
    const double tau = solve_tau(r0, s);
    const double x = s * tau;
    CHECK(pre_jump_level(x, r0) == doctest::Approx(s).epsilon(1e-12));
    CHECK(post_jump_level(x, r0) == doctest::Approx(s * (1 - tau)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(post_jump_level(0.0, r0), DomainError);
  CHECK_THROWS_AS(post_jump_level(0.9, r0), DomainError);
  CHECK_THROWS_AS(post_jump_level_inv(0.6, r0), DomainError);
  CHECK(post_jump_level_inv(post_jump_level(0.3, r0), r0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("cycle length closes the cycle at 1/R0") {
  const ModelParams p = params(3.0);
  for (double x : {0.05, 0.3, 0.6, 0.79}) {
    const double pre = pre_jump_level(x, p.r0);
    const double t_jump = jump_time_of_size(p, x);
    CHECK(growth(1.0 / p.r0, t_jump, p.mu) == doctest::Approx(pre).epsilon(1e-12));
    const double back = growth_time(post_jump_level(x, p.r0), 1.0 / p.r0, p.mu);
    CHECK(cycle_length(x, p.mu, p.r0) == doctest::Approx(t_jump + back).epsilon(1e-10));
  }
  CHECK_THROWS_AS(cycle_length(0.9, p.mu, p.r0), DomainError);
}

TEST_CASE("final size agrees with the ODE") {
  for (double s0 : {0.6, 0.9, 1.0}) {
    for (double i0 : {1e-3, 0.05}) {
      CHECK(final_size({s0, i0}, 2.0) == doctest::Approx(sir_final_size_ode(s0, i0, 2.0)).epsilon(1e-7));
    }
  }
  CHECK_THROWS_AS(final_size({0.9, 0.0}, 2.0), DomainError);
}

TEST_CASE("final-size limit as the initial infective fraction vanishes") {
  // Supercritical: s0 (1 - tau(s0)). Subcritical: the ODE barely moves, so s0.
  CHECK(final_size_limit(0.9, 2.0) == doctest::Approx(sir_final_size_ode(0.9, 1e-9, 2.0)).epsilon(1e-6));
  CHECK(final_size_limit(0.4, 2.0) == 0.4);
  CHECK(sir_final_size_ode(0.4, 1e-9, 2.0) == doctest::Approx(0.4).epsilon(1e-7));
  CHECK(final_size({0.4, 1e-9}, 2.0) == doctest::Approx(0.4).epsilon(1e-7));
}

TEST_CASE("stationary law: normalisation, shape and the two normalisers") {
  for (double kappa : {1.0, 3.0, 100.0}) {
    const StationaryLaw law(params(kappa));
    CHECK(law.cdf(law.support_lo()) == 0.0);
    CHECK(law.cdf(1.0) == 1.0);
    CHECK(law.density(0.1) == 0.0);
    CHECK(law.normalizer() == doctest::Approx(1.0 / law.mean_cycle_length_by_jump_law()).epsilon(1e-8));
    double prev = 0.0;
    for (int j = 1; j <= 100; ++j) {
      const double c = law.cdf(j / 100.0);
      CHECK(c >= prev - 1e-12);
      prev = c;
    }
    const auto h = law.binned(50);
    CHECK(h.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Few importations: mostly near 1. Many: concentrated around 1/R0.
  CHECK(StationaryLaw(params(1.0)).cdf(0.8) < 0.5);
  const StationaryLaw busy(params(100.0));
  CHECK(busy.cdf(0.6) - busy.cdf(0.4) > 0.7);
}

TEST_CASE("mean cycle length matches the mean of simulated cycles") {
  const ModelParams p = params(3.0);
  const auto cycles = limit::simulate_cycles(p, 100'000, std::uint64_t{99});
  std::vector<double> lengths;
  for (const auto& c : cycles) lengths.push_back(c.t_star);
  const auto ms = stats::mean_and_se(lengths);
  const StationaryLaw law(p);
  CHECK(std::abs(ms.mean - law.mean_cycle_length()) < 4.0 * ms.se);
}

TEST_CASE("stationary cdf matches time-average of simulated cycles") {
  // Time below level a in a cycle: renewal-reward oracle for P(S* <= a).
  const ModelParams p = params(3.0);
  const auto cycles = limit::simulate_cycles(p, 100'000, std::uint64_t{7});
  const StationaryLaw law(p);
  for (double a : {0.3, 0.45, 0.7, 0.9}) {
    double below = 0.0, total = 0.0;
    for (const auto& c : cycles) {
      total += c.t_star;
      const double pre = pre_jump_level(c.x, p.r0);
      const double post = post_jump_level(c.x, p.r0);
      // Rising from 1/R0 to pre, then from post back to 1/R0.
      if (a > 1.0 / p.r0) below += std::min(c.t_jump, growth_time(1.0 / p.r0, std::min(a, pre), p.mu));
      if (a > post) below += growth_time(post, std::min(a, 1.0 / p.r0), p.mu);
    }
    CHECK(below / total == doctest::Approx(law.cdf(a)).epsilon(0.02));
  }
}
