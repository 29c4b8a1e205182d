#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "coevo/errors.hpp"

namespace coevo {

/// Rate and kernel parameters of the tumour / CTL model.
///
/// Defaults are the reference parameter set (rates per day, competition and
/// killing coefficients in ul/day). The binding affinity, the affinity range and
/// the two competition radii only have reference ranges, so they default to NaN
/// and must be set explicitly.
struct ModelParams {
  double alpha_C = 1.5;     ///< tumour proliferation rate
  double alpha_T = 0.05;    ///< antigen-independent CTL proliferation rate
  double mu_C = 1.5e-6;     ///< tumour death by clonal competition
  double mu_T = 5e-6;       ///< CTL death by self-regulation
  double zeta_C = 5e-6;     ///< tumour killing by CTLs
  double zeta_T = 3e-5;     ///< CTL clonal expansion on recognition
  double gamma = std::numeric_limits<double>::quiet_NaN();    ///< TCR binding affinity
  double eta = std::numeric_limits<double>::quiet_NaN();      ///< TCR affinity range
  double theta_C = std::numeric_limits<double>::quiet_NaN();  ///< tumour competition radius
  double theta_T = std::numeric_limits<double>::quiet_NaN();  ///< CTL competition radius
  double lambda_C = 0.01;   ///< per-step probability of a phenotype change
  double tau = 0.05;        ///< time step (day)
  double t_final = 30.0;    ///< horizon (day)

  double gamma_C() const noexcept { return zeta_C * gamma; }
  double gamma_T() const noexcept { return zeta_T * gamma; }

  /// Diffusion coefficient matching the random walk: lambda_C * step^2 / (2 tau).
  double beta_C(double step) const noexcept { return lambda_C * step * step / (2.0 * tau); }

  /// Number of time steps in [0, t_final].
  long long steps() const noexcept { return std::llround(t_final / tau); }

  /// Throws ConfigError describing the first violated constraint.
  void validate(double domain_length) const {
    auto require = [](bool ok, const std::string& what) {
      if (!ok) throw ConfigError(what);
    };
    auto finite_nonneg = [&](double v, const char* name) {
      require(std::isfinite(v), std::string(name) + " required");
      require(v >= 0.0, std::string(name) + " must be >= 0");
    };
    finite_nonneg(gamma, "gamma");
    auto radius = [&](double v, const char* name) {
      require(std::isfinite(v), std::string(name) + " required");
      require(v > 0.0 && v <= domain_length,
              std::string(name) + " must lie in (0, 2L]");
    };
    radius(eta, "eta");
    radius(theta_C, "theta_C");
    radius(theta_T, "theta_T");
    finite_nonneg(alpha_C, "alpha_C");
    finite_nonneg(alpha_T, "alpha_T");
    finite_nonneg(mu_C, "mu_C");
    finite_nonneg(mu_T, "mu_T");
    finite_nonneg(zeta_C, "zeta_C");
    finite_nonneg(zeta_T, "zeta_T");
    require(std::isfinite(lambda_C) && lambda_C > 0.0 && lambda_C < 1.0,
            "lambda_C must lie in (0, 1)");
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    require(std::isfinite(t_final) && t_final > 0.0, "t_final must be positive");
    require(steps() >= 1, "t_final must cover at least one time step");
  }
};

/// Amplitude/wavenumber of the cosine initial profiles
/// n_C = 1e4 (1 + a cos(A u)), n_T = 1e4 (2 + a cos(A v)).
struct InitialCondition {
  double amplitude = 0.0;
  double wavenumber = 5.0;

  static constexpr double kBaseDensity = 1e4;

  void validate() const {
    if (!std::isfinite(amplitude) || amplitude < 0.0) {
      throw ConfigError("initial amplitude a must be >= 0");
    }
    if (amplitude > 1.0) {
      throw ConfigError("initial amplitude a > 1 gives a negative tumour density");
    }
    if (!std::isfinite(wavenumber) || !(wavenumber > 0.0)) {
      throw ConfigError("initial wavenumber A must be positive");
    }
  }

  double tumour_density(double u) const noexcept {
    return kBaseDensity * (1.0 + amplitude * std::cos(wavenumber * u));
  }
  double ctl_density(double v) const noexcept {
    return kBaseDensity * (2.0 + amplitude * std::cos(wavenumber * v));
  }
};

}  // namespace coevo
