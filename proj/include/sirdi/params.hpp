#pragma once

namespace sirdi {

/// Constants of the SIR epidemic with demography and importation.
///
/// Time is measured in years. The population has birth rate mu*n and per-capita
/// death rate mu, so its size fluctuates around n. A fraction kappa/n of births
/// are infective, which makes the importation rate mu*kappa independent of n.
struct ModelParams {
  double n = 10000.0;
  double mu = 1.0 / 75.0;
  double r0 = 2.0;
  double gamma = 50.0;
  double kappa = 1.0;

  /// Infection-rate parameter lambda = R0 * gamma.
  double lambda() const { return r0 * gamma; }
  /// Fraction of births that are infective.
  double kappa_n() const { return kappa / n; }
  /// Rate of infective births, mu * n * kappa_n, evaluated without the n round trip.
  double importation_rate() const { return mu * kappa; }

  /// Throws ValidationError naming the first violated constraint.
  void validate() const;
  /// validate(), plus R0 > 1 (needed by everything that uses the limit process).
  void require_supercritical() const;
  bool subcritical() const { return r0 <= 1.0; }

  bool operator==(const ModelParams&) const = default;
};

}  // namespace sirdi
