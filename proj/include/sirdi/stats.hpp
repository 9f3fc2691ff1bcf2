#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace sirdi::stats {

/// Empirical distribution function of a sample. Right-continuous.
class Ecdf {
 public:
  Ecdf() = default;
  explicit Ecdf(std::vector<double> sample);

  /// Fraction of the sample <= x.
  double operator()(double x) const;
  /// Fraction of the sample < x.
  double left_limit(double x) const;

  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// Masses over uniform bins on [lo, hi]. Bins are left-closed except the last,
/// which also holds `hi`. Values outside the support are clamped to the end bins.
class Histogram {
 public:
  Histogram() = default;
  Histogram(double lo, double hi, std::size_t bins);

  static Histogram from_sample(std::span<const double> sample, double lo, double hi,
                               std::size_t bins);

  std::size_t bin_of(double v) const;
  void add(double v, double weight = 1.0) { masses_[bin_of(v)] += weight; }
  void add_to_bin(std::size_t bin, double weight) { masses_[bin] += weight; }

  /// Adds masses bin by bin. Throws BinMismatch if the edges differ.
  void merge(const Histogram& other);

  /// Copy with masses rescaled to sum to one (unchanged if the total is zero).
  Histogram normalized() const;

  double total() const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t bins() const { return masses_.size(); }
  double edge(std::size_t i) const;
  const std::vector<double>& masses() const { return masses_; }
  std::vector<double>& masses() { return masses_; }

  bool same_edges(const Histogram& other) const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> masses_;
};

/// sup_x |F_hat(x) - F(x)|, evaluated on both sides of every sample point.
double ks_distance(const Ecdf& sample, const std::function<double(double)>& cdf);

/// sup_x |F1(x) - F2(x)| for two samples.
double ks_two_sample(const Ecdf& a, const Ecdf& b);

/// Asymptotic Kolmogorov threshold coefficient / sqrt(N). 1.63 is the 99% quantile.
double ks_threshold(std::size_t n, double coefficient = 1.63);
double ks_threshold_two_sample(std::size_t n, std::size_t m, double coefficient = 1.63);

/// Half the L1 distance between the normalised histograms.
double tv_distance(const Histogram& a, const Histogram& b);

/// Wilson score interval for a binomial proportion at two-sided confidence `level`.
std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials,
                                          double level);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_and_se(std::span<const double> sample);
double median(std::vector<double> sample);

}  // namespace sirdi::stats
