// sirdi: simulation, tabulation and verification front end.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "sirdi/analytic.hpp"
#include "sirdi/config.hpp"
#include "sirdi/csv.hpp"
#include "sirdi/ctmc.hpp"
#include "sirdi/error.hpp"
#include "sirdi/limitproc.hpp"
#include "sirdi/parallel.hpp"
#include "sirdi/verify.hpp"

namespace fs = std::filesystem;
using namespace sirdi;

namespace {

enum Exit { kOk = 0, kValidation = 1, kBudget = 2, kVerification = 3 };

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> reps;
  std::optional<std::string> out;
  std::optional<double> stride;
  std::optional<std::size_t> bins;
  unsigned threads = 0;
};

void add_run_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Scenario JSON file");
  sub->add_option("--seed", o.seed, "Base seed");
  sub->add_option("--reps", o.reps, "Replications");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--stride", o.stride, "Years between recorded rows");
  sub->add_option("--bins", o.bins, "Occupancy histogram bins");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.reps) cfg.reps = *o.reps;
  if (o.out) cfg.output_dir = *o.out;
  if (o.stride) cfg.recorder.stride = *o.stride;
  if (o.bins) cfg.recorder.bins = *o.bins;
  cfg.validate();
  return cfg;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return os;
}

void write_histogram(const fs::path& path, const stats::Histogram& h) {
  auto os = open_csv(path);
  csv::Writer w(os, {"bin_lo", "bin_hi", "mass"});
  if (h.total() == 0.0) return;
  const auto norm = h.normalized();
  for (std::size_t b = 0; b < norm.bins(); ++b) w.row(norm.edge(b), norm.edge(b + 1), norm.masses()[b]);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate_ctmc(const Overrides& o) {
  const RunConfig cfg = resolve(o);
  const ModelParams& p = cfg.model;
  if (p.subcritical()) fmt::print(stderr, "warning: R0 <= 1, outbreaks will not take off\n");
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  struct Rep {
    ctmc::SnapshotRecorder snaps;
    ctmc::OutbreakRecorder outbreaks;
    ctmc::OccupancyRecorder occupancy;
    ctmc::SimulationOutput out;
    bool partial = false;
  };
  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<std::unique_ptr<Rep>> runs(reps);
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(reps, o.threads, [&](std::size_t r) {
    auto rep = std::make_unique<Rep>(Rep{ctmc::SnapshotRecorder(cfg.recorder.stride), ctmc::OutbreakRecorder(p.n),
                                         ctmc::OccupancyRecorder(p.n, cfg.recorder.bins), {}, false});
    ctmc::RecorderSet set{&rep->snaps, &rep->outbreaks, &rep->occupancy};
    try {
      rep->out = ctmc::run(p, ctmc::initial_state(p, cfg.s0, cfg.i0), cfg.horizon, set, derive_seed(cfg.seed, r));
    } catch (const ctmc::EventBudgetExceeded& e) {
      rep->out = e.partial();
      rep->partial = true;
    }
    runs[r] = std::move(rep);
  });
  const double wall = seconds_since(t0);

  std::uint64_t events = 0;
  bool any_partial = false;
  stats::Histogram merged(0.0, 1.0, cfg.recorder.bins);
  for (std::size_t r = 0; r < reps; ++r) {
    const Rep& rep = *runs[r];
    const std::string stem = fmt::format("{}_rep{}{}", cfg.scenario, r, rep.partial ? "_partial" : "");
    auto ts = open_csv(dir / (stem + "_timeseries.csv"));
    ctmc::write_timeseries_csv(ts, rep.snaps.rows());
    auto ob = open_csv(dir / (stem + "_outbreaks.csv"));
    ctmc::write_outbreaks_csv(ob, rep.outbreaks.markers());
    write_histogram(dir / (stem + "_occupancy.csv"), rep.occupancy.base());
    merged.merge(rep.occupancy.base());
    events += rep.out.events;
    any_partial = any_partial || rep.partial;
    fmt::print("rep {}: {} events, {} outbreaks{}\n", r, rep.out.events, rep.outbreaks.markers().size(),
               rep.partial ? " (event cap reached, outputs partial)" : "");
  }
  write_histogram(dir / fmt::format("{}{}_occupancy.csv", cfg.scenario, any_partial ? "_partial" : ""), merged);
  fmt::print("events: {}\nwall time: {:.3f} s\n", events, wall);
  return any_partial ? kBudget : kOk;
}

int cmd_simulate_limit(const Overrides& o) {
  const RunConfig cfg = resolve(o);
  const ModelParams& p = cfg.model;
  p.require_supercritical();
  if (!(cfg.s0 > 0.0 && cfg.s0 < 1.0)) throw ValidationError("s0: must lie in (0, 1) for the limit process");
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  const auto reps = static_cast<std::size_t>(cfg.reps);
  std::vector<limit::LimitPath> paths(reps);
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.horizon > 0.0) {
    parallel_for(reps, o.threads, [&](std::size_t r) {
      paths[r] = limit::simulate_thinned(p, cfg.s0, cfg.horizon, derive_seed(cfg.seed, r));
    });
  }
  const double wall = seconds_since(t0);

  stats::Histogram merged(0.0, 1.0, cfg.recorder.bins);
  std::size_t jumps = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::string stem = fmt::format("{}_rep{}", cfg.scenario, r);
    auto ps = open_csv(dir / (stem + "_path.csv"));
    auto cs = open_csv(dir / (stem + "_cycles.csv"));
    if (cfg.horizon > 0.0) {
      limit::write_path_csv(ps, paths[r], cfg.recorder.stride);
      limit::write_cycles_csv(cs, limit::extract_cycles(paths[r]));
      const auto h = limit::occupancy_histogram_raw(paths[r], cfg.recorder.bins);
      write_histogram(dir / (stem + "_occupancy.csv"), h);
      merged.merge(h);
      jumps += paths[r].jumps.size();
    } else {
      csv::Writer(ps, {"t", "s"});
      limit::write_cycles_csv(cs, {});
      write_histogram(dir / (stem + "_occupancy.csv"), stats::Histogram(0.0, 1.0, cfg.recorder.bins));
    }
  }
  write_histogram(dir / (cfg.scenario + "_occupancy.csv"), merged);
  if (p.kappa > 0.0) write_histogram(dir / (cfg.scenario + "_stationary.csv"), analytic::StationaryLaw(p).binned(cfg.recorder.bins));
  fmt::print("jumps: {}\nwall time: {:.3f} s\n", jumps, wall);
  return kOk;
}

struct AnalyticArgs {
  std::string fn;
  ModelParams model;
  std::optional<double> point;
  std::string grid;
  double from = -1.0;  // growth start; default 1/R0
  double i0 = 0.0;
  std::string out;
  bool strict = false;
};

std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  long long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !(in >> std::ws).eof()) {
    throw ValidationError(fmt::format("grid: expected lo:hi:N with N >= 1 (got '{}')", spec));
  }
  std::vector<double> xs;
  for (long long j = 0; j <= n; ++j) xs.push_back(j == n ? hi : lo + (hi - lo) * static_cast<double>(j) / n);
  return xs;
}

int cmd_analytic(const AnalyticArgs& a) {
  const ModelParams& p = a.model;
  p.validate();
  const double from = a.from < 0.0 ? 1.0 / p.r0 : a.from;
  std::optional<analytic::StationaryLaw> law;

  const std::map<std::string, std::function<double(double)>> table = {
      {"tau", [&](double s) { return analytic::solve_tau(p.r0, s); }},
      {"growth", [&](double t) { return analytic::growth(from, t, p.mu); }},
      {"ft", [&](double t) { return analytic::jump_time_cdf(p, t); }},
      {"fx", [&](double x) { return analytic::jump_size_cdf(p, x); }},
      {"g", [&](double x) { return analytic::post_jump_level(x, p.r0); }},
      {"ginv", [&](double s) { return analytic::post_jump_level_inv(s, p.r0); }},
      {"tstar", [&](double x) { return analytic::cycle_length(x, p.mu, p.r0); }},
      {"fstar",
       [&](double s) {
         if (!law) law.emplace(p);
         return law->density(s);
       }},
      {"final_size",
       [&](double s0) {
         return a.i0 > 0.0 ? analytic::final_size({s0, a.i0}, p.r0) : analytic::final_size_limit(s0, p.r0);
       }},
  };
  const auto it = table.find(a.fn);
  if (it == table.end()) throw ValidationError(fmt::format("function: unknown analytic function '{}'", a.fn));

  std::vector<double> args;
  if (!a.grid.empty()) args = parse_grid(a.grid);
  if (a.point) args.push_back(*a.point);
  if (args.empty()) throw ValidationError("grid: give a point (--s, --t or --x) or --grid lo:hi:N");

  std::ofstream file;
  if (!a.out.empty()) file = open_csv(a.out);
  std::ostream& os = a.out.empty() ? std::cout : file;
  csv::Writer w(os, {"arg", "value"});
  for (double x : args) {
    try {
      w.row(x, it->second(x));
    } catch (const DomainError& e) {
      if (a.strict) throw;
      fmt::print(stderr, "warning: {}({:g}): {}\n", a.fn, x, e.what());
      w.row(x, std::optional<double>{});
    }
  }
  return kOk;
}

struct VerifyArgs {
  std::string suite;
  verify::SuiteOptions opts;
  std::optional<double> n, kappa;
  std::string out = "out";
};

int cmd_verify(VerifyArgs& v) {
  if (v.n) v.opts.model.n = *v.n;
  if (v.kappa) v.opts.model.kappa = *v.kappa;
  v.opts.model.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const verify::Report rep = verify::run_suite(v.suite, v.opts);
  fs::create_directories(v.out);
  const fs::path path = fs::path(v.out) / fmt::format("verify_{}.csv", v.suite);
  auto os = open_csv(path);
  bd::write_report_csv(os, rep);
  for (const auto& r : rep.rows) {
    fmt::print("{:<24} n={:<8g} estimate={:<14.8g} target={:<10.6g} {}\n", r.check, r.n, r.estimate, r.target,
               r.pass ? "PASS" : "FAIL");
  }
  fmt::print("report: {}\nwall time: {:.3f} s\n", path.string(), seconds_since(t0));
  if (!rep.all_pass()) {
    for (const auto& f : rep.failures()) fmt::print(stderr, "failed: {}\n", f);
    return kVerification;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIR epidemic with demography and importation: simulation, analytics, verification"};
  app.require_subcommand(1);

  Overrides ctmc_o, limit_o;
  auto* sim_ctmc = app.add_subcommand("simulate-ctmc", "Event-driven simulation of the epidemic chain");
  add_run_flags(sim_ctmc, ctmc_o);
  auto* sim_limit = app.add_subcommand("simulate-limit", "Simulation of the limiting susceptible-fraction process");
  add_run_flags(sim_limit, limit_o);

  AnalyticArgs an;
  auto* analytic_cmd = app.add_subcommand("analytic", "Tabulate an analytic function to CSV arg,value");
  analytic_cmd->add_option("function", an.fn, "tau|growth|ft|fx|g|ginv|tstar|fstar|final_size")->required();
  analytic_cmd->add_option("--r0", an.model.r0, "Basic reproduction number");
  analytic_cmd->add_option("--mu", an.model.mu, "Birth/death rate per year");
  analytic_cmd->add_option("--kappa", an.model.kappa, "Importation parameter");
  analytic_cmd->add_option("--n", an.model.n, "Population size");
  analytic_cmd->add_option("--s,--t,--x", an.point, "Single argument value");
  analytic_cmd->add_option("--grid", an.grid, "Uniform grid lo:hi:N (N + 1 points)");
  analytic_cmd->add_option("--from", an.from, "Start level for growth (default 1/R0)");
  analytic_cmd->add_option("--i0", an.i0, "Initial infective fraction for final_size (0 = limit)");
  analytic_cmd->add_option("--out", an.out, "Output file (default stdout)");
  analytic_cmd->add_flag("--strict", an.strict, "Fail on the first domain error");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", va.suite, "analytic_identities|limit_vs_ctmc|bd_lemma")->required();
  verify_cmd->add_option("--n", va.n, "Population size (limit_vs_ctmc)");
  verify_cmd->add_option("--kappa", va.kappa, "Importation parameter (limit_vs_ctmc)");
  verify_cmd->add_option("--horizon", va.opts.horizon, "Years per run (limit_vs_ctmc)");
  verify_cmd->add_option("--seed", va.opts.seed, "Base seed");
  verify_cmd->add_option("--reps", va.opts.reps, "Replications (limit_vs_ctmc)");
  verify_cmd->add_option("--bins", va.opts.bins, "Histogram bins (limit_vs_ctmc)");
  verify_cmd->add_option("--out", va.out, "Report directory");
  verify_cmd->add_option("--threads", va.opts.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*sim_ctmc) return cmd_simulate_ctmc(ctmc_o);
    if (*sim_limit) return cmd_simulate_limit(limit_o);
    if (*analytic_cmd) return cmd_analytic(an);
    if (*verify_cmd) return cmd_verify(va);
  } catch (const ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kValidation;
  } catch (const DomainError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kValidation;
  } catch (const ctmc::EventBudgetExceeded& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kBudget;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kBudget;
  }
  return kOk;
}
