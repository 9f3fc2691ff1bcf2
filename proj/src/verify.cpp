#include "sirdi/verify.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/core.h>

#include "sirdi/analytic.hpp"
#include "sirdi/ctmc.hpp"
#include "sirdi/error.hpp"
#include "sirdi/limitproc.hpp"
#include "sirdi/parallel.hpp"
#include "sirdi/stats.hpp"

namespace sirdi::verify {

namespace {

Row below(std::string check, double n, double estimate, double tol) {
  Row r;
  r.check = std::move(check);
  r.n = n;
  r.estimate = estimate;
  r.target = tol;
  r.pass = estimate < tol;
  return r;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

Report analytic_identities(const ModelParams& base) {
  Report rep;
  const double r0 = base.r0;
  const double t1 = analytic::tau_one(r0);

  // S(T)/S(T-) = exp(-R0 X) and g(g^{-1}(s)) = s do not involve kappa.
  double ratio_err = 0.0, ginv_err = 0.0, tau_err = 0.0;
  for (int j = 1; j < 1000; ++j) {
    const double x = t1 * j / 1000.0;
    const double ratio = analytic::post_jump_level(x, r0) / analytic::pre_jump_level(x, r0);
    ratio_err = std::max(ratio_err, rel_gap(ratio, std::exp(-r0 * x)));

    const double s = (1.0 - t1) + (1.0 / r0 - (1.0 - t1)) * j / 1000.0;
    ginv_err = std::max(ginv_err, std::abs(analytic::post_jump_level(analytic::post_jump_level_inv(s, r0), r0) - s));

    const double pre = 1.0 / r0 + (1.0 - 1.0 / r0) * j / 1000.0;
    tau_err = std::max(tau_err, rel_gap(analytic::pre_jump_level(pre * analytic::solve_tau(r0, pre), r0), pre));
  }
  rep.rows.push_back(below("jump_ratio", 0.0, ratio_err, 1e-12));
  rep.rows.push_back(below("g_inverse", 0.0, ginv_err, 1e-9));
  rep.rows.push_back(below("tau_pre_level", 0.0, tau_err, 1e-10));

  for (double kappa : {1.0, 3.0, 20.0, 100.0}) {
    ModelParams p = base;
    p.kappa = kappa;
    const std::string tag = fmt::format("_k{:g}", kappa);

    double push_err = 0.0;
    for (int j = 1; j < 1000; ++j) {
      const double x = t1 * j / 1000.0;
      push_err = std::max(push_err, std::abs(analytic::jump_size_cdf(p, x) -
                                             analytic::jump_time_cdf(p, analytic::jump_time_of_size(p, x))));
    }
    rep.rows.push_back(below("pushforward" + tag, 0.0, push_err, 1e-8));

    const analytic::StationaryLaw law(p);
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double s) { return law.density(s); };
    const double mass = ts.integrate(f, law.support_lo(), 1.0 / r0) + ts.integrate(f, 1.0 / r0, 1.0);
    Row norm = below("density_mass" + tag, 0.0, std::abs(mass - 1.0), 1e-6);
    norm.estimate = mass;
    norm.target = 1.0;
    rep.rows.push_back(norm);

    const double c1 = law.normalizer();
    const double c2 = 1.0 / law.mean_cycle_length_by_jump_law();
    Row c = below("normalizer" + tag, 0.0, rel_gap(c1, c2), 1e-6);
    c.estimate = c1;
    c.target = c2;
    rep.rows.push_back(c);
  }
  return rep;
}

Report limit_vs_ctmc(const SuiteOptions& opts) {
  const ModelParams& p = opts.model;
  p.validate();
  p.require_supercritical();
  const stats::Histogram exact = analytic::StationaryLaw(p).binned(opts.bins);
  const auto reps = static_cast<std::size_t>(opts.reps);

  std::vector<stats::Histogram> chain(reps), limit(reps);
  parallel_for(reps, opts.threads, [&](std::size_t r) {
    ctmc::OccupancyRecorder rec(p.n, opts.bins);
    ctmc::run(p, ctmc::initial_state(p, opts.s0), opts.horizon, rec, derive_seed(opts.seed, 2 * r));
    chain[r] = rec.base();
    limit[r] = limit::occupancy_histogram_raw(
        limit::simulate_thinned(p, opts.s0, opts.horizon, derive_seed(opts.seed, 2 * r + 1)), opts.bins);
  });
  for (std::size_t r = 1; r < reps; ++r) {
    chain[0].merge(chain[r]);
    limit[0].merge(limit[r]);
  }

  Report rep;
  rep.rows.push_back(below(fmt::format("limit_tv_k{:g}", p.kappa), p.n,
                           stats::tv_distance(limit[0].normalized(), exact), 0.05));
  rep.rows.push_back(below(fmt::format("ctmc_tv_k{:g}", p.kappa), p.n,
                           stats::tv_distance(chain[0].normalized(), exact), 0.1));
  return rep;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"analytic_identities", "limit_vs_ctmc", "bd_lemma"};
  return names;
}

Report run_suite(std::string_view name, const SuiteOptions& opts) {
  if (name == "analytic_identities") return analytic_identities(opts.model);
  if (name == "limit_vs_ctmc") return limit_vs_ctmc(opts);
  if (name == "bd_lemma") {
    bd::LemmaConfig cfg;
    cfg.seed = opts.seed;
    return bd::verify_lemma_suite(cfg);
  }
  throw ValidationError(fmt::format("suite: unknown suite '{}'", name));
}

}  // namespace sirdi::verify
