#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sirdi/params.hpp"
#include "sirdi/rng.hpp"
#include "sirdi/stats.hpp"

/// Simulation of the limiting regenerative process S and exact path functionals
/// on its piecewise-exponential representation.
namespace sirdi::limit {

/// A down-jump of S. post_value = pre_value * exp(-R0 * jump_size).
struct JumpEvent {
  double time = 0.0;
  double pre_value = 0.0;
  double post_value = 0.0;
  double jump_size = 0.0;
};

/// From t_start the path follows growth(v_start, t - t_start) until the next segment.
struct Segment {
  double t_start = 0.0;
  double v_start = 0.0;
};

/// One regenerative cycle: renewal at 1/R0, jump after t_jump, next renewal after t_star.
struct CycleRecord {
  double t_jump = 0.0;
  double x = 0.0;
  double t_star = 0.0;
};

/// A realisation of S on [0, horizon]. Segment k + 1 begins at jump k.
struct LimitPath {
  double mu = 0.0;
  double r0 = 0.0;
  double horizon = 0.0;
  std::vector<Segment> segments;
  std::vector<JumpEvent> jumps;

  double s_start() const { return segments.front().v_start; }
  /// End time of segment k (next jump, or the horizon).
  double segment_end(std::size_t k) const;
  /// Right-continuous value S(t), t in [0, horizon].
  double value_at(double t) const;
};

/// Path with no jumps: growth from s0 over [0, horizon].
LimitPath deterministic_path(double mu, double r0, double s0, double horizon);

/// Thinned-Poisson construction. Importations arrive at rate mu*kappa; one at a
/// level s triggers a jump to s (1 - tau(s)) with probability max(1 - 1/(R0 s), 0).
LimitPath simulate_thinned(const ModelParams& p, double s0, double horizon, Rng& rng);
LimitPath simulate_thinned(const ModelParams& p, double s0, double horizon, std::uint64_t seed);

/// Independent cycles from the renewal level: T by numerical inversion of its cdf,
/// then S(T-), the jump size and the cycle length in closed form.
std::vector<CycleRecord> simulate_cycles(const ModelParams& p, std::size_t n_cycles, Rng& rng);
std::vector<CycleRecord> simulate_cycles(const ModelParams& p, std::size_t n_cycles,
                                         std::uint64_t seed);

/// Complete cycles of a path: each starts where growth reaches 1/R0 from below
/// (or at t = 0 if the path starts exactly there) and contains one jump.
std::vector<CycleRecord> extract_cycles(const LimitPath& path);

/// First passage functional H_a: the first time the path reaches a, from below if
/// S(0) <= a and from above otherwise. nullopt if it never does within the horizon.
std::optional<double> first_passage(const LimitPath& path, double a);

/// Time in [0, t_star] spent at or below level a. Throws DomainError if t_star
/// exceeds the horizon.
double occupancy(const LimitPath& path, double a, double t_star);

/// Time spent in each of `bins` uniform bins on [0, 1] (raw, summing to the horizon).
stats::Histogram occupancy_histogram_raw(const LimitPath& path, std::size_t bins);
/// occupancy_histogram_raw normalised to unit mass.
stats::Histogram occupancy_histogram(const LimitPath& path, std::size_t bins);

/// CSV `t,s`: rows every dt plus a pre- and a post-jump row at each jump.
void write_path_csv(std::ostream& os, const LimitPath& path, double dt);
/// CSV `t_jump,x,t_star`.
void write_cycles_csv(std::ostream& os, const std::vector<CycleRecord>& cycles);

}  // namespace sirdi::limit
