#include "sirdi/analytic.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "sirdi/error.hpp"
#include "sirdi/numeric.hpp"

namespace sirdi::analytic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this value of r0*x the closed forms lose digits to cancellation and the
// truncated Taylor series takes over.
constexpr double kSeriesCutoff = 1e-3;

// (1 - x - e^{-r0 x}) / ((r0 - 1) x) - 1.
double jump_size_delta(double x, double r0) {
  const double y = r0 * x;
  if (y < kSeriesCutoff) {
    // 1 - e^{-y} = sum_{k>=1} (-1)^{k+1} y^k / k!, truncated at degree 8.
    double term = r0;  // r0^k x^{k-1} / k! at k = 1
    double acc = 0.0;
    for (int k = 2; k <= 8; ++k) {
      term *= y / k;
      acc += (k % 2 == 0 ? -term : term);
    }
    return acc / (r0 - 1.0);
  }
  const double d = -std::expm1(-y) - x;
  return d / ((r0 - 1.0) * x) - 1.0;
}

// log((1 - e^{-y}) / y).
double log_expm1_ratio(double y) {
  if (y < kSeriesCutoff) {
    const double y2 = y * y;
    return -0.5 * y + y2 / 24.0 - y2 * y2 / 2880.0;
  }
  return std::log(-std::expm1(-y) / y);
}

// Derivative of g(x) = x / (e^{r0 x} - 1).
double post_jump_level_derivative(double x, double r0) {
  const double y = r0 * x;
  const double em = std::expm1(y);
  double num;
  if (y < 0.1) {
    // e^y - 1 - y e^y = sum_{k>=2} (1 - k) y^k / k!
    num = 0.0;
    double pw = y;
    for (int k = 2; k <= 16; ++k) {
      pw *= y / k;
      num += (1.0 - k) * pw;
    }
  } else {
    num = em - y * std::exp(y);
  }
  return num / (em * em);
}

void require_supercritical(double r0) {
  if (!(r0 > 1.0)) throw DomainError(fmt::format("r0 must exceed 1 (got {})", r0));
}

}  // namespace

double solve_tau(double r0, double s) {
  const double a = r0 * s;
  if (!(a > 1.0)) {
    throw SubcriticalDomain(fmt::format("solve_tau: r0*s = {} <= 1 has no positive root", a));
  }
  // a + log(1 - tau)/tau decreases from a - 1 > 0 at 0+ to -inf at 1-, with the
  // root of the final-size equation as its only zero. Dividing by tau keeps the
  // bracket resolvable when the root is tiny.
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (a + std::log1p(-mid) / mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double tau = 0.5 * (lo + hi);
  // Newton polish on h(tau) = 1 - tau - e^{-a tau}.
  for (int it = 0; it < 3; ++it) {
    const double e = std::exp(-a * tau);
    const double h = 1.0 - tau - e;
    const double dh = -1.0 + a * e;
    if (dh == 0.0) break;
    const double next = tau - h / dh;
    if (!(next > 0.0 && next < 1.0)) break;
    tau = next;
  }
  return tau;
}

double tau_one(double r0) {
  thread_local double cached_r0 = std::numeric_limits<double>::quiet_NaN();
  thread_local double cached_tau = 0.0;
  if (r0 != cached_r0) {
    cached_tau = solve_tau(r0, 1.0);
    cached_r0 = r0;
  }
  return cached_tau;
}

double growth(double x, double t, double mu) { return x - (1.0 - x) * std::expm1(-mu * t); }

double growth_time(double from, double to, double mu) {
  return std::log((1.0 - from) / (1.0 - to)) / mu;
}

double jump_time_log_survival(const ModelParams& p, double t) {
  if (t <= 0.0) return 0.0;
  const double r0 = p.r0;
  return -p.mu * p.kappa * t * (1.0 - 1.0 / r0) +
         (p.kappa / r0) * std::log(r0 - (r0 - 1.0) * std::exp(-p.mu * t));
}

double jump_time_cdf(const ModelParams& p, double t) {
  return 0.0 - std::expm1(jump_time_log_survival(p, t));  // +0 rather than -0 at t = 0
}

double jump_time_density(const ModelParams& p, double t) {
  if (t < 0.0) return 0.0;
  const double s = growth(1.0 / p.r0, t, p.mu);
  const double hazard = p.mu * p.kappa * std::max(0.0, 1.0 - 1.0 / (p.r0 * s));
  return hazard * std::exp(jump_time_log_survival(p, t));
}

double jump_time_quantile(const ModelParams& p, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0 || p.kappa == 0.0) return kInf;
  double hi = 1.0 / p.mu;
  for (int it = 0; it < 200 && jump_time_cdf(p, hi) < u; ++it) hi *= 2.0;
  double lo = 0.0;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = jump_time_cdf(p, mid);
    if (std::abs(f - u) <= 1e-12 || mid <= lo || mid >= hi) break;
    if (f < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

double jump_size_log_survival(const ModelParams& p, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= tau_one(p.r0)) return -kInf;
  if (p.kappa == 0.0) return 0.0;
  const double r0 = p.r0;
  const double delta = jump_size_delta(x, r0);
  if (!(1.0 + delta > 0.0)) return -kInf;
  return p.kappa * (1.0 - 1.0 / r0) * std::log1p(delta) - p.kappa * log_expm1_ratio(r0 * x);
}

double jump_size_cdf(const ModelParams& p, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= tau_one(p.r0)) return 1.0;
  return -std::expm1(jump_size_log_survival(p, x));
}

double pre_jump_level(double x, double r0) { return x / -std::expm1(-r0 * x); }

double post_jump_level(double x, double r0) {
  const double t1 = tau_one(r0);
  if (!(x > 0.0 && x < t1)) {
    throw DomainError(fmt::format("post_jump_level: x = {} outside (0, tau(1) = {})", x, t1));
  }
  return x / std::expm1(r0 * x);
}

double post_jump_level_inv(double s, double r0) {
  const double t1 = tau_one(r0);
  if (!(s > 1.0 - t1 && s < 1.0 / r0)) {
    throw DomainError(fmt::format("post_jump_level_inv: s = {} outside (1 - tau(1), 1/r0) = ({}, {})",
                                  s, 1.0 - t1, 1.0 / r0));
  }
  double lo = 0.0;
  double hi = t1;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mid / std::expm1(r0 * mid) > s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double jump_time_of_size(const ModelParams& p, double x) {
  return growth_time(1.0 / p.r0, pre_jump_level(x, p.r0), p.mu);
}

double cycle_length(double x, double mu, double r0) {
  const double t1 = tau_one(r0);
  if (!(x > 0.0 && x < t1)) {
    throw DomainError(fmt::format("cycle_length: x = {} outside (0, tau(1) = {})", x, t1));
  }
  // (e^y - 1 - x) / ((1 - x) e^y - 1) written as 1 + x (e^y - 1) / denominator.
  const double y = r0 * x;
  const double em = std::expm1(y);
  const double den = em - x * std::exp(y);
  return std::log1p(x * em / den) / mu;
}

double final_size(FinalSizeInput in, double r0) {
  if (!(in.i0 > 0.0)) {
    throw DomainError(fmt::format("final_size: i0 = {} must be > 0 (use final_size_limit)", in.i0));
  }
  if (!(in.s0 > 0.0)) throw DomainError(fmt::format("final_size: s0 = {} must be > 0", in.s0));
  const double total = in.s0 + in.i0;
  auto phi = [&](double s) { return s - in.s0 * std::exp(-r0 * (total - s)); };
  return numeric::bisect(phi, 0.0, in.s0, 1e-14);
}

double final_size_limit(double s0, double r0) {
  if (!(s0 > 0.0)) throw DomainError(fmt::format("final_size_limit: s0 = {} must be > 0", s0));
  if (r0 * s0 > 1.0) return s0 * (1.0 - solve_tau(r0, s0));
  return s0;
}

StationaryLaw::StationaryLaw(const ModelParams& p) : p_(p) {
  require_supercritical(p.r0);
  if (!(p.kappa > 0.0)) throw DomainError("stationary law requires kappa > 0");
  if (!(p.mu > 0.0)) throw DomainError("stationary law requires mu > 0");
  tau1_ = tau_one(p.r0);

  // Survival of T decays like exp(-mu kappa (1 - 1/R0) t); cut the tail where it is
  // below e^-45, far under the quadrature tolerance.
  const double rate = p.mu * p.kappa * (1.0 - 1.0 / p.r0);
  double hi = 45.0 / rate;
  while (jump_time_log_survival(p, hi) > -45.0) hi *= 2.0;
  t_tail_ = hi;

  lower_total_ = lower_mass(0.0);
  upper_total_ = upper_mass(kInf);
  mean_cycle_ = lower_total_ + upper_total_;
}

double StationaryLaw::lower_mass(double x_from) const {
  // Time spent below 1/R0, integrated over the jump size in x = tau1 - w^2 so
  // the (tau1 - x)^{kappa(1 - 1/R0)} edge behaviour becomes smooth.
  if (x_from >= tau1_) return 0.0;
  const double r0 = p_.r0;
  const double mu = p_.mu;
  const double t1 = tau1_;
  auto integrand = [&](double w) {
    const double x = t1 - w * w;
    if (x <= 0.0 || x >= t1) return 0.0;
    const double surv = std::exp(jump_size_log_survival(p_, x));
    const double g = x / std::expm1(r0 * x);
    return surv * std::abs(post_jump_level_derivative(x, r0)) / (mu * (1.0 - g)) * 2.0 * w;
  };
  return numeric::integrate(integrand, 0.0, std::sqrt(t1 - std::max(0.0, x_from)), 1e-10, 32);
}

double StationaryLaw::upper_mass(double t_to) const {
  // Above 1/R0 the level s is passed t(s) after renewal, with probability P(T > t(s));
  // in the time variable the unnormalised density is just the survival of T.
  const double end = std::min(t_to, t_tail_);
  if (end <= 0.0) return 0.0;
  auto integrand = [&](double t) { return std::exp(jump_time_log_survival(p_, t)); };
  return numeric::integrate(integrand, 0.0, end, 1e-10, 64);
}

double StationaryLaw::density_unnormalized(double s) const {
  if (!(s > 1.0 - tau1_ && s < 1.0)) return 0.0;
  const double r0 = p_.r0;
  const double k = p_.kappa;
  double log_p;
  if (s >= 1.0 / r0) {
    log_p = k * std::log(r0) + k * (1.0 - 1.0 / r0) * std::log((1.0 - s) / (r0 - 1.0)) +
            (k / r0) * std::log(s);
  } else {
    log_p = jump_size_log_survival(p_, post_jump_level_inv(s, r0));
  }
  return std::exp(log_p) / (p_.mu * (1.0 - s));
}

double StationaryLaw::density(double s) const { return density_unnormalized(s) / mean_cycle_; }

double StationaryLaw::cdf(double s) const {
  if (s <= 1.0 - tau1_) return 0.0;
  if (s >= 1.0) return 1.0;
  const double r0 = p_.r0;
  double mass;
  if (s < 1.0 / r0) {
    mass = lower_mass(post_jump_level_inv(s, r0));
  } else {
    mass = lower_total_ + upper_mass(growth_time(1.0 / r0, s, p_.mu));
  }
  return std::min(1.0, mass / mean_cycle_);
}

double StationaryLaw::mean_cycle_length_by_jump_law() const {
  const ModelParams p = p_;
  const double r0 = p.r0;
  double tail = t_tail_;
  while (jump_time_log_survival(p, tail) > -50.0) tail *= 1.5;
  auto integrand = [&](double t) {
    const double pre = growth(1.0 / r0, t, p.mu);
    if (!(r0 * pre > 1.0 + 1e-14)) return 0.0;
    const double tau = solve_tau(r0, pre);
    const double x = pre * tau;
    double t_star;
    if (1.0 - pre > 1e-8) {
      t_star = cycle_length(x, p.mu, r0);
    } else {
      // x is within rounding of tau(1) and the closed form loses all digits;
      // split the cycle at the jump instead.
      t_star = t + growth_time(pre * (1.0 - tau), 1.0 / r0, p.mu);
    }
    return t_star * jump_time_density(p, t);
  };
  return numeric::integrate(integrand, 0.0, tail, 1e-10, 64);
}

stats::Histogram StationaryLaw::binned(std::size_t bins) const {
  stats::Histogram h(0.0, 1.0, bins);
  double prev = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double next = (b + 1 == bins) ? 1.0 : cdf(h.edge(b + 1));
    h.add_to_bin(b, std::max(0.0, next - prev));
    prev = next;
  }
  return h;
}

}  // namespace sirdi::analytic
