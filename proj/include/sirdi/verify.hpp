#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sirdi/birthdeath.hpp"
#include "sirdi/params.hpp"

/// Named verification suites. Every suite reports in the `check,n,estimate,ci_lo,ci_hi,target`
/// layout of the birth-death report.
namespace sirdi::verify {

using Report = bd::LemmaReport;
using Row = bd::LemmaRow;

struct SuiteOptions {
  /// Base parameters; n and kappa are overridden per suite where noted.
  ModelParams model{};
  double horizon = 10'000.0;
  double s0 = 0.5;
  std::size_t bins = 50;
  std::uint64_t seed = 1;
  /// Replications for limit_vs_ctmc; occupancy is pooled over them.
  std::int64_t reps = 10;
  unsigned threads = 1;
};

/// Algebraic identities of the analytic module for kappa in {1, 3, 20, 100}.
Report analytic_identities(const ModelParams& base = {});

/// TV between the occupancy histograms of the chain and of the limit process and
/// the binned stationary density, for opts.model.
Report limit_vs_ctmc(const SuiteOptions& opts);

/// Runs a suite by name: analytic_identities, limit_vs_ctmc or bd_lemma.
/// Throws ValidationError for an unknown name.
Report run_suite(std::string_view name, const SuiteOptions& opts);

const std::vector<std::string>& suite_names();

}  // namespace sirdi::verify
