#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sirdi/numeric.hpp"
#include "sirdi/params.hpp"
#include "sirdi/rng.hpp"
#include "sirdi/stats.hpp"

/// Exact event-driven simulation of the SIR chain with demography and importation,
/// outbreak delineation and the min/max sandwich paths.
namespace sirdi::ctmc {

enum class EventKind : std::uint8_t {
  BirthSusceptible,
  BirthInfective,
  DeathSusceptible,
  DeathInfective,
  DeathRecovered,
  Infection,
  Recovery,
};
inline constexpr std::size_t kEventKinds = 7;

const char* to_string(EventKind kind);

struct EpidemicState {
  std::int64_t s = 0;
  std::int64_t i = 0;
  std::int64_t r = 0;
  double t = 0.0;

  std::int64_t total() const { return s + i + r; }
  bool operator==(const EpidemicState&) const = default;
};

/// s = round(s0 n), i = i0, r = round((1 - s0) n), t = 0.
EpidemicState initial_state(const ModelParams& p, double s0, std::int64_t i0 = 0);

/// The seven transition intensities in EventKind order.
std::array<double, kEventKinds> event_rates(const EpidemicState& st, const ModelParams& p);

/// Reference single step: recomputes every rate from scratch.
/// Throws AbsorbedEmpty when the total rate is zero.
std::pair<EpidemicState, EventKind> step(const EpidemicState& st, const ModelParams& p, Rng& rng);

/// Receives the state after every event. Recorders may end a run early.
class Recorder {
 public:
  virtual ~Recorder() = default;
  virtual void on_start(const EpidemicState& /*initial*/) {}
  virtual void on_event(const EpidemicState& after, EventKind kind) = 0;
  virtual void on_finish(double /*t_end*/) {}
  virtual bool wants_stop() const { return false; }
};

/// Fans events out to several recorders.
class RecorderSet : public Recorder {
 public:
  RecorderSet() = default;
  RecorderSet(std::initializer_list<Recorder*> rs) : recorders_(rs) {}
  void add(Recorder& r) { recorders_.push_back(&r); }

  void on_start(const EpidemicState& st) override;
  void on_event(const EpidemicState& after, EventKind kind) override;
  void on_finish(double t_end) override;
  bool wants_stop() const override;

 private:
  std::vector<Recorder*> recorders_;
};

struct RunOptions {
  std::uint64_t event_cap = std::uint64_t{1} << 33;
  /// Events between full recomputations of the total rate.
  std::uint64_t resync_interval = 1'000'000;
};

struct SimulationOutput {
  EpidemicState final_state;
  std::uint64_t events = 0;
  /// Largest relative gap seen between the maintained and recomputed total rate.
  double max_rate_drift = 0.0;
  bool stopped_early = false;
  bool subcritical_warning = false;
};

class EventBudgetExceeded : public std::runtime_error {
 public:
  EventBudgetExceeded(const std::string& what, SimulationOutput partial)
      : std::runtime_error(what), partial_(partial) {}
  const SimulationOutput& partial() const { return partial_; }

 private:
  SimulationOutput partial_;
};

/// Direct-method simulator with per-category rates kept in step with the counts.
class Simulator {
 public:
  Simulator(const ModelParams& p, const EpidemicState& init, std::uint64_t seed);

  /// Fires the next event if it occurs no later than `until`. Otherwise moves the
  /// clock to `until` and returns nullopt.
  std::optional<EventKind> advance(double until);

  const EpidemicState& state() const { return state_; }
  double total_rate() const { return total_; }
  const std::array<double, kEventKinds>& rates() const { return rates_; }
  std::uint64_t events() const { return events_; }
  double max_rate_drift() const { return max_drift_; }

  /// Recomputes the total rate from the per-category rates and records the drift.
  void resync();

 private:
  void apply(EventKind kind);

  ModelParams p_;
  EpidemicState state_;
  Rng rng_;
  std::array<double, kEventKinds> rates_{};
  double total_ = 0.0;
  double infection_coef_ = 0.0;
  numeric::CompensatedSum clock_;
  std::uint64_t events_ = 0;
  double max_drift_ = 0.0;
};

/// Runs the chain from `init` for `horizon` years, feeding `recorder`.
/// Throws EventBudgetExceeded (carrying the partial output) at the event cap;
/// the recorder has seen on_finish by then.
SimulationOutput run(const ModelParams& p, const EpidemicState& init, double horizon,
                     Recorder& recorder, std::uint64_t seed, const RunOptions& opts = {});

/// Complete event log, initial state first. Counts are stored as 32-bit integers.
struct EventLog {
  std::vector<double> t;
  std::vector<std::int32_t> s, i, r;
  double horizon = 0.0;

  std::size_t size() const { return t.size(); }
  void push(const EpidemicState& st);
};

class EventLogRecorder : public Recorder {
 public:
  void on_start(const EpidemicState& st) override;
  void on_event(const EpidemicState& after, EventKind) override { log_.push(after); }
  void on_finish(double t_end) override { log_.horizon = t_end; }

  const EventLog& log() const { return log_; }
  EventLog take() { return std::move(log_); }

 private:
  EventLog log_;
};

/// ceil(ln n), at least 1: the infective count that marks a major outbreak.
std::int64_t outbreak_threshold(double n);

struct OutbreakMarker {
  std::size_t k = 0;
  double t_k = 0.0;   // I first reaches the threshold
  double u_k = 0.0;   // I next returns to 0 (the horizon if still open)
  double s_min = 0.0;
  double s_max = 0.0;
  bool closed = true;
};

/// Forward scan over (t, s_bar, i) states that opens a window when i reaches the
/// threshold and closes it when i returns to 0.
class OutbreakTracker {
 public:
  explicit OutbreakTracker(std::int64_t threshold) : threshold_(threshold) {}

  void consume(double t, double s_bar, std::int64_t i);
  /// Closes a window left open at the end of the run (marked closed = false).
  void finish(double t_end);

  bool in_window() const { return open_; }
  const std::vector<OutbreakMarker>& markers() const { return markers_; }

 private:
  std::int64_t threshold_;
  bool open_ = false;
  OutbreakMarker current_;
  std::vector<OutbreakMarker> markers_;
};

std::vector<OutbreakMarker> delineate_outbreaks(const EventLog& log, double n);

class OutbreakRecorder : public Recorder {
 public:
  explicit OutbreakRecorder(double n) : n_(n), tracker_(outbreak_threshold(n)) {}
  void on_start(const EpidemicState& st) override;
  void on_event(const EpidemicState& after, EventKind) override;
  void on_finish(double t_end) override { tracker_.finish(t_end); }
  const std::vector<OutbreakMarker>& markers() const { return tracker_.markers(); }

 private:
  double n_;
  OutbreakTracker tracker_;
};

/// Piecewise-constant paths indexed by log entry: value j holds on [t_j, t_{j+1}).
struct SandwichPaths {
  std::vector<double> t;
  std::vector<double> base;
  std::vector<double> lower;
  std::vector<double> upper;
  double horizon = 0.0;
};

/// base = S/n; lower/upper replace it on each [t_k, u_k) by the window's min/max.
SandwichPaths sandwich(const EventLog& log, const std::vector<OutbreakMarker>& markers, double n);

/// Time spent per bin on [0, 1] by a piecewise-constant path (raw, not normalised).
stats::Histogram occupancy_histogram_raw(std::span<const double> t, std::span<const double> values,
                                         double horizon, std::size_t bins);

/// Streaming occupancy histograms of the base, lower and upper paths.
class OccupancyRecorder : public Recorder {
 public:
  OccupancyRecorder(double n, std::size_t bins);
  void on_start(const EpidemicState& st) override;
  void on_event(const EpidemicState& after, EventKind) override;
  void on_finish(double t_end) override;

  const stats::Histogram& base() const { return base_; }
  const stats::Histogram& lower() const { return lower_; }
  const stats::Histogram& upper() const { return upper_; }

 private:
  void hold_until(double t);
  void close_window();

  double n_;
  std::int64_t threshold_;
  stats::Histogram base_, lower_, upper_;
  double last_t_ = 0.0;
  double last_value_ = 0.0;
  bool open_ = false;
  double window_time_ = 0.0;
  double window_min_ = 0.0;
  double window_max_ = 0.0;
};

struct FunctionalEstimate {
  std::optional<double> first_passage;
  double occupancy = 0.0;
};

/// First passage to a (direction from the value at 0) of a piecewise-constant path.
std::optional<double> first_passage(std::span<const double> t, std::span<const double> values,
                                    double horizon, double a);
/// Time in [0, t_star] a piecewise-constant path spends at or below a.
double occupancy(std::span<const double> t, std::span<const double> values, double horizon,
                 double a, double t_star);

/// H_a and H^a_{t*} on S/n from a complete log. Throws DomainError if t_star > horizon.
FunctionalEstimate functional_estimates(const EventLog& log, double n, double a, double t_star);

/// Stops the run as soon as S/n first reaches level a.
class FirstPassageRecorder : public Recorder {
 public:
  FirstPassageRecorder(double n, double a) : n_(n), a_(a) {}
  void on_start(const EpidemicState& st) override;
  void on_event(const EpidemicState& after, EventKind) override;
  bool wants_stop() const override { return hit_.has_value(); }
  std::optional<double> time() const { return hit_; }

 private:
  double n_;
  double a_;
  bool upward_ = true;
  std::optional<double> hit_;
};

/// Fixed-stride snapshots of the state.
class SnapshotRecorder : public Recorder {
 public:
  explicit SnapshotRecorder(double stride) : stride_(stride) {}
  void on_start(const EpidemicState& st) override;
  void on_event(const EpidemicState& after, EventKind) override;
  void on_finish(double t_end) override;

  struct Row {
    double t;
    std::int64_t s, i, r;
  };
  const std::vector<Row>& rows() const { return rows_; }

 private:
  void emit_through(double t, bool inclusive);

  double stride_;
  std::uint64_t next_index_ = 0;
  EpidemicState last_;
  std::vector<Row> rows_;
};

/// Follows each importation into an infective-free population until I reaches the
/// outbreak threshold or returns to 0, split by whether S/n was below 1/R0.
class ImportationRecorder : public Recorder {
 public:
  ImportationRecorder(double n, double r0) : n_(n), r0_(r0), threshold_(outbreak_threshold(n)) {}
  void on_event(const EpidemicState& after, EventKind kind) override;

  struct Counts {
    std::int64_t trials = 0;
    std::int64_t reached = 0;
  };
  const Counts& subcritical() const { return below_; }
  const Counts& supercritical() const { return above_; }

 private:
  double n_;
  double r0_;
  std::int64_t threshold_;
  bool active_ = false;
  bool active_below_ = false;
  Counts below_, above_;
};

void write_timeseries_csv(std::ostream& os, const std::vector<SnapshotRecorder::Row>& rows);
void write_outbreaks_csv(std::ostream& os, const std::vector<OutbreakMarker>& markers);

}  // namespace sirdi::ctmc
