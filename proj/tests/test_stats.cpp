#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "sirdi/error.hpp"
#include "sirdi/rng.hpp"
#include "sirdi/stats.hpp"

using namespace sirdi;
using namespace sirdi::stats;

TEST_CASE("Ecdf agrees with brute-force counting") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto size = 1 + static_cast<std::size_t>(rng.uniform() * 1000);
    std::vector<double> xs;
    for (std::size_t i = 0; i < size; ++i) xs.push_back(std::floor(rng.uniform() * 50) / 50);  // with ties
    const Ecdf e(xs);
    for (int q = 0; q < 100; ++q) {
      const double x = (q % 2) ? xs[static_cast<std::size_t>(rng.uniform() * size)] : rng.uniform() * 1.2 - 0.1;
      const auto le = std::count_if(xs.begin(), xs.end(), [&](double v) { return v <= x; });
      const auto lt = std::count_if(xs.begin(), xs.end(), [&](double v) { return v < x; });
      CHECK(e(x) == static_cast<double>(le) / size);
      CHECK(e.left_limit(x) == static_cast<double>(lt) / size);
    }
  }
  const Ecdf e({1.0, 2.0});
  CHECK(e(0.5) == 0.0);
  CHECK(e(2.0) == 1.0);
}

TEST_CASE("histogram masses equal Ecdf increments") {
  Rng rng(4);
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(rng.uniform());
  const auto h = Histogram::from_sample(xs, 0.0, 1.0, 20).normalized();
  const Ecdf e(xs);
  for (std::size_t b = 0; b < 20; ++b) {
    const double inc = (b + 1 == 20 ? 1.0 : e.left_limit(h.edge(b + 1))) - e.left_limit(h.edge(b));
    CHECK(std::abs(h.masses()[b] - inc) < 1e-12);
  }
  CHECK(std::abs(h.total() - 1.0) < 1e-12);
}

TEST_CASE("histogram bins, clamping and merging") {
  Histogram h(0.0, 1.0, 4);
  CHECK(h.bin_of(0.0) == 0);
  CHECK(h.bin_of(0.25) == 1);
  CHECK(h.bin_of(1.0) == 3);
  CHECK(h.bin_of(-3.0) == 0);
  CHECK(h.bin_of(7.0) == 3);
  h.add(0.1, 2.0);
  Histogram g(0.0, 1.0, 4);
  g.add(0.9);
  Histogram k(0.0, 1.0, 4);
  k.add(0.6, 0.5);
  Histogram left = h, right = g;
  left.merge(g);
  left.merge(k);
  right.merge(k);
  Histogram assoc = h;
  assoc.merge(right);
  CHECK(left.masses() == assoc.masses());
  CHECK(left.total() == 3.5);
  CHECK_THROWS_AS(h.merge(Histogram(0.0, 1.0, 5)), BinMismatch);
  CHECK(Histogram(0.0, 1.0, 3).normalized().total() == 0.0);
}

TEST_CASE("KS distance") {
  auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_distance(Ecdf({0.5}), uniform_cdf) == doctest::Approx(0.5));
  CHECK(ks_distance(Ecdf({0.2, 0.2, 0.2}), [](double) { return 0.0; }) == 1.0);
  CHECK_THROWS_AS(ks_distance(Ecdf{}, uniform_cdf), EmptySample);

  Rng rng(11);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(rng.uniform());
  CHECK(ks_distance(Ecdf(xs), uniform_cdf) < ks_threshold(xs.size()));
  CHECK(ks_threshold(10000) == doctest::Approx(0.0163));
  CHECK(ks_threshold_two_sample(500, 500) == doctest::Approx(1.63 * std::sqrt(2.0 / 500)));

  std::vector<double> ys;
  for (int i = 0; i < 5000; ++i) ys.push_back(rng.uniform());
  CHECK(ks_two_sample(Ecdf(xs), Ecdf(ys)) < ks_threshold_two_sample(xs.size(), ys.size()));
  CHECK(ks_two_sample(Ecdf({0.0}), Ecdf({1.0})) == 1.0);
}

TEST_CASE("total variation") {
  Histogram a(0.0, 1.0, 4), b(0.0, 1.0, 4);
  a.add(0.1);
  a.add(0.6, 3.0);
  b.add(0.9);
  CHECK(tv_distance(a.normalized(), a.normalized()) == 0.0);
  CHECK(tv_distance(a.normalized(), b.normalized()) == 1.0);
  CHECK_THROWS_AS(tv_distance(a, Histogram(0.0, 2.0, 4)), BinMismatch);
}

TEST_CASE("Wilson interval") {
  auto [lo0, hi0] = wilson_interval(0, 40, 0.95);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  auto [lo1, hi1] = wilson_interval(40, 40, 0.95);
  CHECK(hi1 == 1.0);
  CHECK(lo1 < 1.0);

  // (50, 100, 95%): both ends solve (p_hat - p)^2 = z^2 p (1 - p) / n, centred on
  // (p_hat + z^2 / 2n) / (1 + z^2 / n).
  const double z = boost::math::quantile(boost::math::normal(), 0.975);
  auto [lo, hi] = wilson_interval(50, 100, 0.95);
  CHECK(lo < 0.5);
  CHECK(hi > 0.5);
  for (double p : {lo, hi}) CHECK((0.5 - p) * (0.5 - p) == doctest::Approx(z * z * p * (1 - p) / 100).epsilon(1e-10));
  const double center = (0.5 + z * z / 200) / (1 + z * z / 100);
  CHECK((lo + hi) / 2 == doctest::Approx(center).epsilon(1e-12));

  auto [l7, h7] = wilson_interval(7, 30, 0.99);
  const double z99 = boost::math::quantile(boost::math::normal(), 0.995);
  const double ph = 7.0 / 30;
  for (double p : {l7, h7}) CHECK((ph - p) * (ph - p) == doctest::Approx(z99 * z99 * p * (1 - p) / 30).epsilon(1e-10));
}

TEST_CASE("mean, standard error and median") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const auto ms = mean_and_se(xs);
  CHECK(ms.mean == 2.5);
  CHECK(ms.se == doctest::Approx(std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0 / 4.0)));
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), EmptySample);
}
