#include "sirdi/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sirdi::numeric {

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol,
              int max_iter) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  double abs_tol;
  double floor_tol;

  double recurse(double a, double b, double fa, double fm, double fb, double whole,
                 double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(tol, floor_tol) || h < 1e-15 * (std::abs(a) + std::abs(b))) {
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 int panels) {
  if (a == b) return 0.0;
  const double h = (b - a) / panels;

  // Coarse pass fixes the absolute tolerance from the magnitude of the integral.
  std::vector<double> fx(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) fx[i] = f(a + 0.5 * h * i);
  double coarse_abs = 0.0;
  for (int p = 0; p < panels; ++p) {
    coarse_abs += h / 6.0 * (std::abs(fx[2 * p]) + 4.0 * std::abs(fx[2 * p + 1]) + std::abs(fx[2 * p + 2]));
  }
  const double scale = coarse_abs > 0 ? coarse_abs : std::numeric_limits<double>::min();
    // Roundoff in a sub-interval estimate is about eps times the whole integral;
  // demanding less than that would recurse without bound.
  Simpson simpson{f, rel_tol * scale, 8.0 * std::numeric_limits<double>::epsilon() * scale};

  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + h * p;
    const double pb = (p + 1 == panels) ? b : pa + h;
    const double whole = h / 6.0 * (fx[2 * p] + 4.0 * fx[2 * p + 1] + fx[2 * p + 2]);
    total += simpson.recurse(pa, pb, fx[2 * p], fx[2 * p + 1], fx[2 * p + 2], whole,
                             simpson.abs_tol / panels, 40);
  }
  return total;
}

}  // namespace sirdi::numeric
