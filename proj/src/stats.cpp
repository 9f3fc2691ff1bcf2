#include "sirdi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <fmt/core.h>

#include "sirdi/error.hpp"

namespace sirdi::stats {

Ecdf::Ecdf(std::vector<double> sample) : sorted_(std::move(sample)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::left_limit(double x) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

Histogram::Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), masses_(bins, 0.0) {
  if (bins == 0) throw ValidationError("bins: must be >= 1");
  if (!(hi > lo)) throw ValidationError("histogram support: hi must exceed lo");
}

Histogram Histogram::from_sample(std::span<const double> sample, double lo, double hi,
                                 std::size_t bins) {
  Histogram h(lo, hi, bins);
  for (double v : sample) h.add(v);
  return h;
}

std::size_t Histogram::bin_of(double v) const {
  const double pos = (v - lo_) / (hi_ - lo_) * static_cast<double>(masses_.size());
  if (!(pos > 0.0)) return 0;
  const auto idx = static_cast<std::size_t>(pos);
  return std::min(idx, masses_.size() - 1);
}

double Histogram::edge(std::size_t i) const {
  if (i == masses_.size()) return hi_;
  return lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(masses_.size());
}

bool Histogram::same_edges(const Histogram& other) const {
  return lo_ == other.lo_ && hi_ == other.hi_ && masses_.size() == other.masses_.size();
}

void Histogram::merge(const Histogram& other) {
  if (!same_edges(other)) throw BinMismatch("histograms have different bin edges");
  for (std::size_t i = 0; i < masses_.size(); ++i) masses_[i] += other.masses_[i];
}

double Histogram::total() const { return std::accumulate(masses_.begin(), masses_.end(), 0.0); }

Histogram Histogram::normalized() const {
  Histogram out = *this;
  const double t = total();
  if (t > 0) {
    for (double& m : out.masses_) m /= t;
  }
  return out;
}

double ks_distance(const Ecdf& sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw EmptySample("ks_distance: empty sample");
  const auto& xs = sample.sorted();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample(const Ecdf& a, const Ecdf& b) {
  if (a.empty() || b.empty()) throw EmptySample("ks_two_sample: empty sample");
  const auto& xa = a.sorted();
  const auto& xb = b.sorted();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] <= x) ++i;
    while (j < xb.size() && xb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_threshold(std::size_t n, double coefficient) {
  return coefficient / std::sqrt(static_cast<double>(n));
}

double ks_threshold_two_sample(std::size_t n, std::size_t m, double coefficient) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return coefficient * std::sqrt((nn + mm) / (nn * mm));
}

double tv_distance(const Histogram& a, const Histogram& b) {
  if (!a.same_edges(b)) throw BinMismatch("tv_distance: histograms have different bin edges");
  const Histogram pa = a.normalized();
  const Histogram pb = b.normalized();
  double s = 0.0;
  for (std::size_t i = 0; i < pa.bins(); ++i) s += std::abs(pa.masses()[i] - pb.masses()[i]);
  return 0.5 * s;
}

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials,
                                          double level) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw ValidationError(fmt::format("wilson_interval: need 0 <= successes ({}) <= trials ({}), trials >= 1",
                                      successes, trials));
  }
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  double lo = centre - half;
  double hi = centre + half;
  if (successes == 0) lo = 0.0;
  if (successes == trials) hi = 1.0;
  return {std::max(0.0, lo), std::min(1.0, hi)};
}

MeanSe mean_and_se(std::span<const double> sample) {
  MeanSe out;
  if (sample.empty()) return out;
  const double n = static_cast<double>(sample.size());
  out.mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  if (sample.size() > 1) {
    double ss = 0.0;
    for (double v : sample) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1) / n);
  }
  return out;
}

double median(std::vector<double> sample) {
  if (sample.empty()) throw EmptySample("median: empty sample");
  const auto mid = sample.begin() + static_cast<std::ptrdiff_t>(sample.size() / 2);
  std::nth_element(sample.begin(), mid, sample.end());
  if (sample.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(sample.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace sirdi::stats
