#include "sirdi/limitproc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>

#include "sirdi/analytic.hpp"
#include "sirdi/csv.hpp"
#include "sirdi/error.hpp"

namespace sirdi::limit {

using analytic::growth;
using analytic::growth_time;

double LimitPath::segment_end(std::size_t k) const {
  return k + 1 < segments.size() ? segments[k + 1].t_start : horizon;
}

double LimitPath::value_at(double t) const {
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const Segment& s) { return v < s.t_start; });
  if (it != segments.begin()) --it;
  return growth(it->v_start, std::max(0.0, t - it->t_start), mu);
}

LimitPath deterministic_path(double mu, double r0, double s0, double horizon) {
  LimitPath path;
  path.mu = mu;
  path.r0 = r0;
  path.horizon = horizon;
  path.segments.push_back({0.0, s0});
  return path;
}

LimitPath simulate_thinned(const ModelParams& p, double s0, double horizon, Rng& rng) {
  p.require_supercritical();
  if (!(s0 > 0.0 && s0 < 1.0)) throw DomainError(fmt::format("s0 = {} outside (0, 1)", s0));
  if (!(horizon > 0.0)) throw DomainError(fmt::format("horizon = {} must be > 0", horizon));

  LimitPath path = deterministic_path(p.mu, p.r0, s0, horizon);
  const double rate = p.importation_rate();
  if (rate == 0.0) return path;

  double t = 0.0;
  while (true) {
    t += rng.exponential(rate);
    if (t > horizon) break;
    const Segment& seg = path.segments.back();
    const double pre = growth(seg.v_start, t - seg.t_start, p.mu);
    const double accept = std::max(1.0 - 1.0 / (p.r0 * pre), 0.0);
    if (rng.uniform() < accept) {
      const double tau = analytic::solve_tau(p.r0, pre);
      const double post = pre * (1.0 - tau);
      path.jumps.push_back({t, pre, post, pre * tau});
      path.segments.push_back({t, post});
    }
  }
  return path;
}

LimitPath simulate_thinned(const ModelParams& p, double s0, double horizon, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_thinned(p, s0, horizon, rng);
}

std::vector<CycleRecord> simulate_cycles(const ModelParams& p, std::size_t n_cycles, Rng& rng) {
  p.require_supercritical();
  if (!(p.kappa > 0.0)) throw DomainError("simulate_cycles: kappa = 0 gives no jumps");
  const double renewal = 1.0 / p.r0;
  std::vector<CycleRecord> out;
  out.reserve(n_cycles);
  for (std::size_t c = 0; c < n_cycles; ++c) {
    const double t_jump = analytic::jump_time_quantile(p, rng.uniform());
    const double pre = growth(renewal, t_jump, p.mu);
    const double tau = analytic::solve_tau(p.r0, pre);
    const double x = pre * tau;
    double t_star;
    if (1.0 - pre > 1e-8) {
      t_star = analytic::cycle_length(x, p.mu, p.r0);
    } else {
      t_star = t_jump + growth_time(pre * (1.0 - tau), renewal, p.mu);
    }
    out.push_back({t_jump, x, t_star});
  }
  return out;
}

std::vector<CycleRecord> simulate_cycles(const ModelParams& p, std::size_t n_cycles,
                                         std::uint64_t seed) {
  Rng rng(seed);
  return simulate_cycles(p, n_cycles, rng);
}

std::vector<CycleRecord> extract_cycles(const LimitPath& path) {
  const double renewal = 1.0 / path.r0;
  std::vector<CycleRecord> out;
  for (std::size_t k = 0; k < path.jumps.size(); ++k) {
    const Segment& seg = path.segments[k];
    if (seg.v_start > renewal) continue;  // cycle started before t = 0
    const double t_renewal = seg.t_start + growth_time(seg.v_start, renewal, path.mu);
    const JumpEvent& jump = path.jumps[k];
    const double t_jump = jump.time - t_renewal;
    out.push_back({t_jump, jump.jump_size, t_jump + growth_time(jump.post_value, renewal, path.mu)});
  }
  return out;
}

std::optional<double> first_passage(const LimitPath& path, double a) {
  if (path.s_start() <= a) {
    if (path.s_start() == a) return 0.0;
    if (a >= 1.0) return std::nullopt;
    // Jumps only go down, so the level can only be reached by growth.
    for (std::size_t k = 0; k < path.segments.size(); ++k) {
      const Segment& seg = path.segments[k];
      const double hit = seg.t_start + growth_time(seg.v_start, a, path.mu);
      if (hit <= path.segment_end(k)) return hit;
    }
    return std::nullopt;
  }
  // Between jumps the path increases, so it can only get down to a at a jump.
  for (const JumpEvent& j : path.jumps) {
    if (j.post_value <= a) return j.time;
  }
  return std::nullopt;
}

double occupancy(const LimitPath& path, double a, double t_star) {
  if (t_star > path.horizon * (1.0 + 1e-12)) {
    throw DomainError(fmt::format("occupancy: t_star = {} exceeds horizon {}", t_star, path.horizon));
  }
  if (a >= 1.0) return t_star;
  double total = 0.0;
  for (std::size_t k = 0; k < path.segments.size(); ++k) {
    const Segment& seg = path.segments[k];
    if (seg.t_start >= t_star) break;
    if (seg.v_start > a) continue;
    const double end = std::min({path.segment_end(k), t_star,
                                 seg.t_start + growth_time(seg.v_start, a, path.mu)});
    total += std::max(0.0, end - seg.t_start);
  }
  return total;
}

stats::Histogram occupancy_histogram_raw(const LimitPath& path, std::size_t bins) {
  stats::Histogram h(0.0, 1.0, bins);
  for (std::size_t k = 0; k < path.segments.size(); ++k) {
    const Segment& seg = path.segments[k];
    const double t0 = seg.t_start;
    const double t1 = path.segment_end(k);
    if (t1 <= t0) continue;
    const double v1 = growth(seg.v_start, t1 - t0, path.mu);
    // Each bin receives the time between the crossings of its edges, both clamped
    // to the segment, so the bin times add up to the segment length.
    auto crossing = [&](double level) {
      if (level <= seg.v_start) return t0;
      if (level >= v1) return t1;
      return std::min(t1, t0 + growth_time(seg.v_start, level, path.mu));
    };
    const std::size_t first = h.bin_of(seg.v_start);
    const std::size_t last = h.bin_of(v1);
    for (std::size_t b = first; b <= last; ++b) {
      const double enter = b == first ? t0 : crossing(h.edge(b));
      const double leave = b == last ? t1 : crossing(h.edge(b + 1));
      h.add_to_bin(b, std::max(0.0, leave - enter));
    }
  }
  return h;
}

stats::Histogram occupancy_histogram(const LimitPath& path, std::size_t bins) {
  return occupancy_histogram_raw(path, bins).normalized();
}

void write_path_csv(std::ostream& os, const LimitPath& path, double dt) {
  if (!(dt > 0.0)) throw DomainError(fmt::format("path export step dt = {} must be > 0", dt));
  csv::Writer w(os, {"t", "s"});
  std::size_t j = 0;
  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t > path.horizon) break;
    for (; j < path.jumps.size() && path.jumps[j].time <= t; ++j) {
      w.row(path.jumps[j].time, path.jumps[j].pre_value);
      w.row(path.jumps[j].time, path.jumps[j].post_value);
    }
    w.row(t, path.value_at(t));
  }
  for (; j < path.jumps.size(); ++j) {
    w.row(path.jumps[j].time, path.jumps[j].pre_value);
    w.row(path.jumps[j].time, path.jumps[j].post_value);
  }
}

void write_cycles_csv(std::ostream& os, const std::vector<CycleRecord>& cycles) {
  csv::Writer w(os, {"t_jump", "x", "t_star"});
  for (const CycleRecord& c : cycles) w.row(c.t_jump, c.x, c.t_star);
}

}  // namespace sirdi::limit
