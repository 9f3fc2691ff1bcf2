#pragma once

#include <cstddef>

#include "sirdi/params.hpp"
#include "sirdi/stats.hpp"

/// Closed-form and quadrature evaluation of the distributions of the limiting
/// susceptible-fraction process S.
///
/// Between down-jumps S grows as S' = mu (1 - S). A cycle starts when S crosses
/// 1/R0 from below; after a random time T it jumps from S(T-) to
/// S(T) = S(T-) (1 - tau(S(T-))), and grows again until it reaches 1/R0.
namespace sirdi::analytic {

/// Unique strictly positive root of 1 - tau = exp(-r0 * s * tau).
/// Throws SubcriticalDomain when r0 * s <= 1.
double solve_tau(double r0, double s);

/// tau(1) for the given R0, memoised per thread.
double tau_one(double r0);

/// f(x, t) = 1 - (1 - x) exp(-mu t): the level reached from x after time t.
double growth(double x, double t, double mu);

/// Time for growth() to carry `from` up to `to` (from <= to < 1).
double growth_time(double from, double to, double mu);

/// log P(T > t) for the time from a renewal to the next jump.
double jump_time_log_survival(const ModelParams& p, double t);
/// P(T <= t).
double jump_time_cdf(const ModelParams& p, double t);
/// Density of T: hazard mu kappa (1 - 1/(R0 S(t))) times survival.
double jump_time_density(const ModelParams& p, double t);
/// Inverse of jump_time_cdf, accurate to 1e-10 in probability. u in [0, 1).
double jump_time_quantile(const ModelParams& p, double u);

/// log P(X > x) for the jump size X, x in (0, tau(1)).
double jump_size_log_survival(const ModelParams& p, double x);
/// P(X <= x); 0 for x <= 0 and 1 for x >= tau(1).
double jump_size_cdf(const ModelParams& p, double x);

/// S(T-) given jump size x: x / (1 - exp(-r0 x)).
double pre_jump_level(double x, double r0);
/// g(x) = x / (exp(r0 x) - 1) = S(T) given jump size x. Domain (0, tau(1)).
double post_jump_level(double x, double r0);
/// g^{-1}(s) for s in (1 - tau(1), 1/r0), by bisection.
double post_jump_level_inv(double s, double r0);
/// Time from renewal to a jump of size x: inverts S(T-) = 1 - (1 - 1/R0) e^{-mu T}.
double jump_time_of_size(const ModelParams& p, double x);

/// Cycle length T*(x): time for growth to carry S(T) = g(x) up to S(T-).
double cycle_length(double x, double mu, double r0);

struct FinalSizeInput {
  double s0 = 1.0;
  double i0 = 0.0;
};

/// Limit s_inf of the deterministic general epidemic ds = -R0 s i, di = R0 s i - i.
/// Requires i0 > 0; root of s = s0 exp(-R0 (s0 + i0 - s)) in (0, s0).
double final_size(FinalSizeInput in, double r0);

/// The i0 -> 0 limit of final_size: s0 (1 - tau(s0)) if R0 s0 > 1, else s0.
double final_size_limit(double s0, double r0);

/// Stationary law of S, with the normalising constant computed on construction.
class StationaryLaw {
 public:
  explicit StationaryLaw(const ModelParams& p);

  const ModelParams& params() const { return p_; }
  double tau1() const { return tau1_; }
  /// Lower edge of the support, 1 - tau(1).
  double support_lo() const { return 1.0 - tau1_; }

  /// f_{S*}(s), zero outside (1 - tau(1), 1).
  double density(double s) const;
  /// Unnormalised density P(s in [S(T), S(T-)]) / (mu (1 - s)).
  double density_unnormalized(double s) const;
  /// P(S* <= s).
  double cdf(double s) const;

  /// c = 1 / E[T*] from quadrature of the unnormalised density.
  double normalizer() const { return 1.0 / mean_cycle_; }
  /// E[T*] from quadrature of the unnormalised density.
  double mean_cycle_length() const { return mean_cycle_; }
  /// E[T*] from quadrature of T*(x) against the law of the jump size.
  double mean_cycle_length_by_jump_law() const;

  /// Exact per-bin masses of f_{S*} over `bins` uniform bins on [0, 1].
  stats::Histogram binned(std::size_t bins) const;

 private:
  double lower_mass(double x_from) const;
  double upper_mass(double t_to) const;

  ModelParams p_;
  double tau1_;
  double t_tail_;
  double lower_total_;
  double upper_total_;
  double mean_cycle_;
};

}  // namespace sirdi::analytic
