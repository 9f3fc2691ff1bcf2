#pragma once

#include <functional>

namespace sirdi::numeric {

/// Root of f on [lo, hi] by bisection. f(lo) and f(hi) must have opposite signs
/// (zero counts as either sign). Stops when the bracket is narrower than `xtol`.
double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol,
              int max_iter = 400);

/// Adaptive Simpson quadrature of f over [a, b] with relative tolerance `rel_tol`.
/// The interval is first split into `panels` pieces so that localised features
/// are not missed by the initial five-point estimate.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8, int panels = 16);

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double v) : sum_(v) {}

  void add(double v) {
    const double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sirdi::numeric
