#include "sirdi/ctmc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/core.h>

#include "sirdi/csv.hpp"
#include "sirdi/error.hpp"

namespace sirdi::ctmc {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::BirthSusceptible: return "birth_susceptible";
    case EventKind::BirthInfective: return "birth_infective";
    case EventKind::DeathSusceptible: return "death_susceptible";
    case EventKind::DeathInfective: return "death_infective";
    case EventKind::DeathRecovered: return "death_recovered";
    case EventKind::Infection: return "infection";
    case EventKind::Recovery: return "recovery";
  }
  return "unknown";
}

EpidemicState initial_state(const ModelParams& p, double s0, std::int64_t i0) {
  if (!(s0 >= 0.0 && s0 <= 1.0)) throw ValidationError(fmt::format("s0: must lie in [0, 1] (got {})", s0));
  if (i0 < 0) throw ValidationError(fmt::format("i0: must be >= 0 (got {})", i0));
  EpidemicState st;
  st.s = std::llround(s0 * p.n);
  st.i = i0;
  st.r = std::llround((1.0 - s0) * p.n);
  return st;
}

std::array<double, kEventKinds> event_rates(const EpidemicState& st, const ModelParams& p) {
  const double s = static_cast<double>(st.s);
  const double i = static_cast<double>(st.i);
  const double r = static_cast<double>(st.r);
  return {
      p.mu * p.n - p.importation_rate(),  // (1 - kappa_n) n mu
      p.importation_rate(),               // kappa_n n mu
      p.mu * s,
      p.mu * i,
      p.mu * r,
      p.lambda() / p.n * s * i,
      p.gamma * i,
  };
}

namespace {

void apply_event(EpidemicState& st, EventKind kind) {
  switch (kind) {
    case EventKind::BirthSusceptible: ++st.s; break;
    case EventKind::BirthInfective: ++st.i; break;
    case EventKind::DeathSusceptible: --st.s; break;
    case EventKind::DeathInfective: --st.i; break;
    case EventKind::DeathRecovered: --st.r; break;
    case EventKind::Infection: --st.s; ++st.i; break;
    case EventKind::Recovery: --st.i; ++st.r; break;
  }
}

EventKind select(const std::array<double, kEventKinds>& rates, double target) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < kEventKinds; ++k) {
    acc += rates[k];
    if (target < acc) return static_cast<EventKind>(k);
  }
  // Rounding can leave target just above the partial sums; the last category with
  // positive rate takes it.
  for (std::size_t k = kEventKinds; k-- > 0;) {
    if (rates[k] > 0.0) return static_cast<EventKind>(k);
  }
  return EventKind::BirthSusceptible;
}

}  // namespace

std::pair<EpidemicState, EventKind> step(const EpidemicState& st, const ModelParams& p, Rng& rng) {
  const auto rates = event_rates(st, p);
  double total = 0.0;
  for (double r : rates) total += r;
  if (!(total > 0.0)) throw AbsorbedEmpty("total event rate is zero");
  EpidemicState next = st;
  next.t += rng.exponential(total);
  const EventKind kind = select(rates, rng.uniform() * total);
  apply_event(next, kind);
  return {next, kind};
}

void RecorderSet::on_start(const EpidemicState& st) {
  for (Recorder* r : recorders_) r->on_start(st);
}
void RecorderSet::on_event(const EpidemicState& after, EventKind kind) {
  for (Recorder* r : recorders_) r->on_event(after, kind);
}
void RecorderSet::on_finish(double t_end) {
  for (Recorder* r : recorders_) r->on_finish(t_end);
}
bool RecorderSet::wants_stop() const {
  return std::any_of(recorders_.begin(), recorders_.end(), [](const Recorder* r) { return r->wants_stop(); });
}

Simulator::Simulator(const ModelParams& p, const EpidemicState& init, std::uint64_t seed)
    : p_(p), state_(init), rng_(seed), clock_(init.t) {
  p_.validate();
  if (init.s < 0 || init.i < 0 || init.r < 0) throw ValidationError("initial counts must be >= 0");
  infection_coef_ = p_.lambda() / p_.n;
  rates_ = event_rates(state_, p_);
  for (double r : rates_) total_ += r;
}

void Simulator::resync() {
  double exact = 0.0;
  for (double r : rates_) exact += r;
  if (exact > 0.0) max_drift_ = std::max(max_drift_, std::abs(total_ - exact) / exact);
  total_ = exact;
  if (state_.s < 0 || state_.i < 0 || state_.r < 0) {
    throw std::logic_error(fmt::format("negative count at t = {}", state_.t));
  }
}

void Simulator::apply(EventKind kind) {
  apply_event(state_, kind);
  assert(state_.s >= 0 && state_.i >= 0 && state_.r >= 0);
  // Births have constant rates; every other category is a function of the counts
  // and is recomputed from them, so only the running total can drift.
  const double s = static_cast<double>(state_.s);
  const double i = static_cast<double>(state_.i);
  const double r = static_cast<double>(state_.r);
  const double death_s = p_.mu * s;
  const double death_i = p_.mu * i;
  const double death_r = p_.mu * r;
  const double infection = infection_coef_ * s * i;
  const double recovery = p_.gamma * i;
  total_ += (death_s - rates_[2]) + (death_i - rates_[3]) + (death_r - rates_[4]) +
            (infection - rates_[5]) + (recovery - rates_[6]);
  rates_[2] = death_s;
  rates_[3] = death_i;
  rates_[4] = death_r;
  rates_[5] = infection;
  rates_[6] = recovery;
}

std::optional<EventKind> Simulator::advance(double until) {
  if (!(total_ > 0.0)) throw AbsorbedEmpty("total event rate is zero");
  const double dt = rng_.exponential(total_);
  if (state_.t + dt > until) {
    state_.t = until;
    clock_ = numeric::CompensatedSum(until);
    return std::nullopt;
  }
  clock_.add(dt);
  state_.t = clock_.value();
  const EventKind kind = select(rates_, rng_.uniform() * total_);
  apply(kind);
  ++events_;
  return kind;
}

SimulationOutput run(const ModelParams& p, const EpidemicState& init, double horizon,
                     Recorder& recorder, std::uint64_t seed, const RunOptions& opts) {
  if (!(horizon >= 0.0)) throw ValidationError(fmt::format("horizon: must be >= 0 (got {})", horizon));
  Simulator sim(p, init, seed);
  SimulationOutput out;
  out.subcritical_warning = p.subcritical();
  const double end = init.t + horizon;
  recorder.on_start(init);
  const std::uint64_t resync = std::max<std::uint64_t>(1, opts.resync_interval);
  if (horizon > 0.0) {
    while (true) {
      if (sim.events() >= opts.event_cap) {
        recorder.on_finish(sim.state().t);
        out.final_state = sim.state();
        out.events = sim.events();
        out.max_rate_drift = sim.max_rate_drift();
        throw EventBudgetExceeded(
            fmt::format("event budget of {} events exhausted at t = {}", opts.event_cap, sim.state().t), out);
      }
      const auto kind = sim.advance(end);
      if (!kind) break;
      if (sim.events() % resync == 0) sim.resync();
      recorder.on_event(sim.state(), *kind);
      if (recorder.wants_stop()) {
        out.stopped_early = true;
        break;
      }
    }
  }
  sim.resync();
  recorder.on_finish(sim.state().t);
  out.final_state = sim.state();
  out.events = sim.events();
  out.max_rate_drift = sim.max_rate_drift();
  return out;
}

void EventLog::push(const EpidemicState& st) {
  constexpr auto kMax = std::numeric_limits<std::int32_t>::max();
  if (st.s > kMax || st.i > kMax || st.r > kMax) {
    throw std::overflow_error("EventLog: count exceeds 32-bit storage");
  }
  t.push_back(st.t);
  s.push_back(static_cast<std::int32_t>(st.s));
  i.push_back(static_cast<std::int32_t>(st.i));
  r.push_back(static_cast<std::int32_t>(st.r));
}

void EventLogRecorder::on_start(const EpidemicState& st) {
  log_ = EventLog{};
  log_.push(st);
  log_.horizon = st.t;
}

std::int64_t outbreak_threshold(double n) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::log(n))));
}

void OutbreakTracker::consume(double t, double s_bar, std::int64_t i) {
  if (open_) {
    current_.s_min = std::min(current_.s_min, s_bar);
    current_.s_max = std::max(current_.s_max, s_bar);
    if (i == 0) {
      current_.u_k = t;
      current_.closed = true;
      markers_.push_back(current_);
      open_ = false;
    }
  } else if (i >= threshold_) {
    open_ = true;
    current_ = OutbreakMarker{markers_.size() + 1, t, t, s_bar, s_bar, false};
  }
}

void OutbreakTracker::finish(double t_end) {
  if (!open_) return;
  current_.u_k = t_end;
  current_.closed = false;
  markers_.push_back(current_);
  open_ = false;
}

std::vector<OutbreakMarker> delineate_outbreaks(const EventLog& log, double n) {
  OutbreakTracker tracker(outbreak_threshold(n));
  for (std::size_t j = 0; j < log.size(); ++j) {
    tracker.consume(log.t[j], log.s[j] / n, log.i[j]);
  }
  tracker.finish(log.horizon);
  return tracker.markers();
}

void OutbreakRecorder::on_start(const EpidemicState& st) {
  tracker_.consume(st.t, static_cast<double>(st.s) / n_, st.i);
}

void OutbreakRecorder::on_event(const EpidemicState& after, EventKind) {
  tracker_.consume(after.t, static_cast<double>(after.s) / n_, after.i);
}

SandwichPaths sandwich(const EventLog& log, const std::vector<OutbreakMarker>& markers, double n) {
  SandwichPaths out;
  out.horizon = log.horizon;
  out.t = log.t;
  out.base.resize(log.size());
  for (std::size_t j = 0; j < log.size(); ++j) out.base[j] = log.s[j] / n;
  out.lower = out.base;
  out.upper = out.base;
  std::size_t j = 0;
  for (const OutbreakMarker& m : markers) {
    while (j < log.size() && log.t[j] < m.t_k) ++j;
    for (; j < log.size() && (log.t[j] < m.u_k || (!m.closed && log.t[j] <= m.u_k)); ++j) {
      out.lower[j] = m.s_min;
      out.upper[j] = m.s_max;
    }
  }
  return out;
}

stats::Histogram occupancy_histogram_raw(std::span<const double> t, std::span<const double> values,
                                         double horizon, std::size_t bins) {
  stats::Histogram h(0.0, 1.0, bins);
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double end = j + 1 < t.size() ? t[j + 1] : horizon;
    if (end > t[j]) h.add(values[j], end - t[j]);
  }
  return h;
}

OccupancyRecorder::OccupancyRecorder(double n, std::size_t bins)
    : n_(n), threshold_(outbreak_threshold(n)), base_(0.0, 1.0, bins), lower_(0.0, 1.0, bins),
      upper_(0.0, 1.0, bins) {}

void OccupancyRecorder::on_start(const EpidemicState& st) {
  last_t_ = st.t;
  last_value_ = static_cast<double>(st.s) / n_;
  open_ = false;
  if (st.i >= threshold_) {
    open_ = true;
    window_time_ = 0.0;
    window_min_ = window_max_ = last_value_;
  }
}

void OccupancyRecorder::hold_until(double t) {
  const double dt = t - last_t_;
  if (dt > 0.0) {
    const std::size_t b = base_.bin_of(last_value_);
    base_.add_to_bin(b, dt);
    if (open_) {
      window_time_ += dt;
    } else {
      lower_.add_to_bin(b, dt);
      upper_.add_to_bin(b, dt);
    }
  }
  last_t_ = t;
}

void OccupancyRecorder::close_window() {
  lower_.add(window_min_, window_time_);
  upper_.add(window_max_, window_time_);
  open_ = false;
}

void OccupancyRecorder::on_event(const EpidemicState& after, EventKind) {
  hold_until(after.t);
  last_value_ = static_cast<double>(after.s) / n_;
  if (open_) {
    window_min_ = std::min(window_min_, last_value_);
    window_max_ = std::max(window_max_, last_value_);
    if (after.i == 0) close_window();
  } else if (after.i >= threshold_) {
    open_ = true;
    window_time_ = 0.0;
    window_min_ = window_max_ = last_value_;
  }
}

void OccupancyRecorder::on_finish(double t_end) {
  hold_until(t_end);
  if (open_) close_window();
}

std::optional<double> first_passage(std::span<const double> t, std::span<const double> values,
                                    double horizon, double a) {
  if (values.empty()) return std::nullopt;
  const bool upward = values[0] <= a;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (t[j] > horizon) break;
    if (upward ? values[j] >= a : values[j] <= a) return t[j];
  }
  return std::nullopt;
}

double occupancy(std::span<const double> t, std::span<const double> values, double horizon,
                 double a, double t_star) {
  if (t_star > horizon * (1.0 + 1e-12)) {
    throw DomainError(fmt::format("occupancy: t_star = {} exceeds horizon {}", t_star, horizon));
  }
  double total = 0.0;
  for (std::size_t j = 0; j < t.size() && t[j] < t_star; ++j) {
    const double end = std::min(j + 1 < t.size() ? t[j + 1] : horizon, t_star);
    if (values[j] <= a) total += end - t[j];
  }
  return total;
}

FunctionalEstimate functional_estimates(const EventLog& log, double n, double a, double t_star) {
  std::vector<double> values(log.size());
  for (std::size_t j = 0; j < log.size(); ++j) values[j] = log.s[j] / n;
  FunctionalEstimate out;
  out.first_passage = first_passage(log.t, values, log.horizon, a);
  out.occupancy = occupancy(log.t, values, log.horizon, a, t_star);
  return out;
}

void FirstPassageRecorder::on_start(const EpidemicState& st) {
  const double v = static_cast<double>(st.s) / n_;
  upward_ = v <= a_;
  hit_.reset();
  if (v == a_) hit_ = st.t;
}

void FirstPassageRecorder::on_event(const EpidemicState& after, EventKind) {
  if (hit_) return;
  const double v = static_cast<double>(after.s) / n_;
  if (upward_ ? v >= a_ : v <= a_) hit_ = after.t;
}

void SnapshotRecorder::on_start(const EpidemicState& st) {
  if (!(stride_ > 0.0)) throw ValidationError(fmt::format("stride: must be > 0 (got {})", stride_));
  last_ = st;
  next_index_ = 0;
  rows_.clear();
}

void SnapshotRecorder::emit_through(double t, bool inclusive) {
  while (true) {
    const double tg = static_cast<double>(next_index_) * stride_;
    if (inclusive ? tg > t : tg >= t) break;
    rows_.push_back({tg, last_.s, last_.i, last_.r});
    ++next_index_;
  }
}

void SnapshotRecorder::on_event(const EpidemicState& after, EventKind) {
  emit_through(after.t, false);
  last_ = after;
}

void SnapshotRecorder::on_finish(double t_end) {
  if (t_end > 0.0) emit_through(t_end, true);
}

void ImportationRecorder::on_event(const EpidemicState& after, EventKind kind) {
  if (active_) {
    if (after.i >= threshold_ || after.i == 0) {
      Counts& c = active_below_ ? below_ : above_;
      ++c.trials;
      if (after.i >= threshold_) ++c.reached;
      active_ = false;
    }
    return;
  }
  if (kind == EventKind::BirthInfective && after.i == 1) {
    active_ = true;
    active_below_ = static_cast<double>(after.s) / n_ < 1.0 / r0_;
  }
}

void write_timeseries_csv(std::ostream& os, const std::vector<SnapshotRecorder::Row>& rows) {
  csv::Writer w(os, {"t", "s", "i", "r", "n_total"});
  for (const auto& row : rows) w.row(row.t, row.s, row.i, row.r, row.s + row.i + row.r);
}

void write_outbreaks_csv(std::ostream& os, const std::vector<OutbreakMarker>& markers) {
  csv::Writer w(os, {"k", "t_k", "u_k", "s_min", "s_max"});
  for (const auto& m : markers) w.row(static_cast<std::int64_t>(m.k), m.t_k, m.u_k, m.s_min, m.s_max);
}

}  // namespace sirdi::ctmc
