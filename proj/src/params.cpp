#include "sirdi/params.hpp"

#include <cmath>

#include <fmt/core.h>

#include "sirdi/error.hpp"

namespace sirdi {

namespace {

void check(bool ok, const char* field, const char* rule, double value) {
  if (!ok) throw ValidationError(fmt::format("{}: must satisfy {} (got {})", field, rule, value));
}

}  // namespace

void ModelParams::validate() const {
  check(std::isfinite(n) && n > 0.0, "n", "n > 0", n);
  check(std::isfinite(mu) && mu > 0.0, "mu", "mu > 0", mu);
  check(std::isfinite(gamma) && gamma > 0.0, "gamma", "gamma > 0", gamma);
  check(std::isfinite(r0) && r0 >= 0.0, "r0", "r0 >= 0", r0);
  check(std::isfinite(kappa) && kappa >= 0.0, "kappa", "kappa >= 0", kappa);
  check(kappa <= n, "kappa", "kappa <= n (infective births cannot exceed all births)", kappa);
}

void ModelParams::require_supercritical() const {
  validate();
  check(r0 > 1.0, "r0", "r0 > 1 for the limit process", r0);
}

}  // namespace sirdi
