#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/params.hpp"
#include "coevo/trajectory.hpp"

namespace coevo {

// ---------------------------------------------------------------------------
// Homogeneous steady states
// ---------------------------------------------------------------------------

struct TotalsPair {
  double rho_C = 0.0;
  double rho_T = 0.0;
};

struct SteadyStates {
  TotalsPair semitrivial;              ///< (0, |I| alpha_T / mu_T)
  std::optional<TotalsPair> nontrivial;  ///< coexistence; present iff gamma < gamma_threshold
  double gamma_threshold = 0.0;        ///< (mu_T / alpha_T) (alpha_C / zeta_C)
};

/// Totals of the spatially homogeneous steady states on an interval of length |I|.
inline SteadyStates steady_states(const ModelParams& p, double domain_length) {
  if (!(p.alpha_T > 0.0) || !(p.mu_T > 0.0)) {
    throw DomainError("steady states need alpha_T > 0 and mu_T > 0");
  }
  if (!(p.zeta_C > 0.0)) throw DomainError("steady states need zeta_C > 0");
  SteadyStates out;
  out.semitrivial = {0.0, domain_length * p.alpha_T / p.mu_T};
  out.gamma_threshold = (p.mu_T / p.alpha_T) * (p.alpha_C / p.zeta_C);
  if (p.gamma < out.gamma_threshold) {
    const double gC = p.gamma_C();
    const double gT = p.gamma_T();
    const double den = gT * gC + p.mu_C * p.mu_T;
    out.nontrivial = TotalsPair{domain_length * (p.alpha_C * p.mu_T - p.alpha_T * gC) / den,
                                domain_length * (p.alpha_T * p.mu_C + p.alpha_C * gT) / den};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadratic lambda^2 - B lambda + C = 0
// ---------------------------------------------------------------------------

struct EigenReport {
  double B = 0.0;
  double C = 0.0;
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
  bool stable = false;

  double max_real() const { return std::max(lambda_plus.real(), lambda_minus.real()); }
};

/// Roots of lambda^2 - B lambda + C via the cancellation-free formula.
inline EigenReport quadratic_roots(double B, double C) {
  EigenReport r;
  r.B = B;
  r.C = C;
  const double disc = B * B - 4.0 * C;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    const double q = 0.5 * (B + std::copysign(sq, B));
    if (q == 0.0) {
      r.lambda_plus = r.lambda_minus = 0.0;
    } else {
      const double a = q;
      const double b = C / q;
      r.lambda_plus = std::max(a, b);
      r.lambda_minus = std::min(a, b);
    }
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    r.lambda_plus = {0.5 * B, im};
    r.lambda_minus = {0.5 * B, -im};
  }
  r.stable = r.lambda_plus.real() < 0.0 && r.lambda_minus.real() < 0.0;
  return r;
}

enum class SteadyKind { semitrivial, nontrivial };

/// Growth rates of spatially uniform perturbations about a homogeneous steady state.
inline EigenReport homogeneous_stability(const ModelParams& p, SteadyKind which) {
  const double gC = p.gamma_C();
  const double gT = p.gamma_T();
  if (which == SteadyKind::semitrivial) {
    if (!(p.mu_T > 0.0)) throw DomainError("semitrivial state needs mu_T > 0");
    const double B = p.alpha_C - gC * p.alpha_T / p.mu_T - p.alpha_T;
    const double C = p.alpha_T * (gC * p.alpha_T / p.mu_T - p.alpha_C);
    return quadratic_roots(B, C);
  }
  const SteadyStates ss = steady_states(p, 1.0);
  if (!ss.nontrivial) throw DomainError("nontrivial steady state does not exist (gamma >= gamma threshold)");
  const double den = gT * gC + p.mu_C * p.mu_T;
  const double c_part = (p.alpha_C * p.mu_T - p.alpha_T * gC) / den;
  const double t_part = (p.alpha_T * p.mu_C + p.alpha_C * gT) / den;
  const double B = -(p.mu_C * c_part + p.mu_T * t_part);
  const double C = c_part * t_part * (p.mu_C * p.mu_T + gC * gT);
  return quadratic_roots(B, C);
}

// ---------------------------------------------------------------------------
// Dispersion relation about the coexistence state
// ---------------------------------------------------------------------------

/// sin(x)/x with a series branch near zero.
inline double sinc(double x) {
  if (std::abs(x) < 1e-6) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

/// Linear algebra inputs for cosine modes: steady totals, beta and |I|.
struct DispersionInputs {
  ModelParams params;
  double beta_C = 0.0;
  double domain_length = 2.0;
  TotalsPair coexistence;
};

inline DispersionInputs dispersion_inputs(const ModelParams& p, double beta_C, double domain_length) {
  const SteadyStates ss = steady_states(p, domain_length);
  if (!ss.nontrivial) throw DomainError("dispersion needs the coexistence steady state (gamma < gamma threshold)");
  return {p, beta_C, domain_length, *ss.nontrivial};
}

/// B(k), C(k) for the mode cos(k u). k = 0 reproduces the homogeneous case.
inline EigenReport mode_growth(const DispersionInputs& in, double k) {
  const ModelParams& p = in.params;
  const double nC = in.coexistence.rho_C / in.domain_length;
  const double nT = in.coexistence.rho_T / in.domain_length;
  const double sC = sinc(k * p.theta_C);
  const double sT = sinc(k * p.theta_T);
  const double sE = sinc(k * p.eta);
  const double diff = k * k * in.beta_C;
  const double B = -diff - p.mu_C * sC * nC - p.mu_T * sT * nT;
  const double C = diff * p.mu_T * sT * nT + nC * nT * (p.gamma_C() * p.gamma_T() * sE * sE + p.mu_C * p.mu_T * sC * sT);
  return quadratic_roots(B, C);
}

struct DispersionMode {
  int m = 0;
  double k = 0.0;
  double B = 0.0;
  double C = 0.0;
  double re_lambda_max = 0.0;
};

struct DispersionCurve {
  std::vector<DispersionMode> modes;
  /// The sinc reduction holds for eta, theta_C, theta_T in (0, L) and
  /// phenotypes in [-L + sigma, L - sigma].
  bool within_validity = true;
  double sigma = 0.0;
  std::string note;
};

/// k_m = m pi / |I| for m = 1..max_mode.
inline double mode_wavenumber(int m, double domain_length) {
  return static_cast<double>(m) * std::numbers::pi / domain_length;
}

inline DispersionCurve dispersion(const ModelParams& p, double beta_C, double domain_length, int max_mode = 100) {
  if (max_mode < 1) throw DomainError("dispersion needs max_mode >= 1");
  const DispersionInputs in = dispersion_inputs(p, beta_C, domain_length);
  DispersionCurve curve;
  const double L = 0.5 * domain_length;
  curve.sigma = std::max({p.eta, p.theta_C, p.theta_T});
  for (double r : {p.eta, p.theta_C, p.theta_T}) {
    if (!(r > 0.0 && r < L)) curve.within_validity = false;
  }
  if (!curve.within_validity) {
    curve.note = "eta, theta_C, theta_T not all in (0, L); sinc reduction is outside its derivation range";
  }
  curve.modes.reserve(static_cast<std::size_t>(max_mode));
  for (int m = 1; m <= max_mode; ++m) {
    const double k = mode_wavenumber(m, domain_length);
    const EigenReport e = mode_growth(in, k);
    curve.modes.push_back({m, k, e.B, e.C, e.max_real()});
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Sufficient bound on beta_C for pattern formation (theta_C = theta_T = theta)
// ---------------------------------------------------------------------------

/// sin(k theta) values within this distance of zero are treated as zero, so
/// modes with k theta on a multiple of pi never enter the negative set.
inline constexpr double kSinZeroTolerance = 1e-12;

struct PatternBound {
  std::vector<int> modes;        ///< m <= max_mode with sin(k_m theta) < 0
  std::optional<double> bound;   ///< min over modes; empty when the set is empty
  std::optional<int> argmin_mode;
  double beta_C = 0.0;
  bool verdict = false;          ///< beta_C < bound
  std::string diagnostic;
};

inline PatternBound pattern_bound(const ModelParams& p, double theta, double beta_C, double domain_length,
                                  int max_mode = 100) {
  const double L = 0.5 * domain_length;
  if (!(theta > 0.0 && theta < L)) throw DomainError("pattern bound needs theta in (0, L)");
  if (max_mode < 1) throw DomainError("pattern bound needs max_mode >= 1");
  const SteadyStates ss = steady_states(p, domain_length);
  if (!ss.nontrivial) throw DomainError("pattern bound needs the coexistence steady state");
  const double weight = ss.nontrivial->rho_C * p.mu_C + ss.nontrivial->rho_T * p.mu_T;

  PatternBound out;
  out.beta_C = beta_C;
  for (int m = 1; m <= max_mode; ++m) {
    const double k = mode_wavenumber(m, domain_length);
    if (!(std::sin(k * theta) < -kSinZeroTolerance)) continue;
    out.modes.push_back(m);
    const double value = -sinc(k * theta) * weight / (k * k * domain_length);
    if (!out.bound || value < *out.bound) {
      out.bound = value;
      out.argmin_mode = m;
    }
  }
  if (!out.bound) {
    out.diagnostic = "no mode m <= " + std::to_string(max_mode) + " has sin(k theta) < 0";
    return out;
  }
  out.verdict = beta_C < *out.bound;
  return out;
}

// ---------------------------------------------------------------------------
// Immune-score classification
// ---------------------------------------------------------------------------

enum class ScenarioLabel { cold, altered, hot, eradication };

inline std::string_view to_string(ScenarioLabel l) {
  switch (l) {
    case ScenarioLabel::cold: return "cold";
    case ScenarioLabel::altered: return "altered";
    case ScenarioLabel::hot: return "hot";
    case ScenarioLabel::eradication: return "eradication";
  }
  return "?";
}

struct ClassifyOptions {
  double hot_threshold = 10.0;
  double cold_threshold = 1.0;
  /// Tumour counted as eradicated when its final total is below this value
  /// (agent runs hit exactly 0; continuum runs use one cell).
  double extinction_level = 1.0;
};

struct ScenarioClassification {
  double I_bar = 0.0;
  ScenarioLabel label = ScenarioLabel::cold;
};

/// I_bar = (tau / t_elapsed) * sum of I_h over steps h >= 1 with rho_C > 0.
inline ScenarioClassification classify(std::span<const double> rho_C, std::span<const double> immune_score,
                                       const ClassifyOptions& opt = {}) {
  if (rho_C.size() < 2 || rho_C.size() != immune_score.size()) {
    throw DomainError("classification needs a trajectory with at least one step");
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t h = 1; h < rho_C.size(); ++h) {
    if (!(rho_C[h] > 0.0)) continue;
    sum += immune_score[h];
    ++counted;
  }
  ScenarioClassification out;
  out.I_bar = counted > 0 ? sum / static_cast<double>(counted) : 0.0;
  if (rho_C.back() < opt.extinction_level) {
    out.label = ScenarioLabel::eradication;
  } else if (out.I_bar >= opt.hot_threshold) {
    out.label = ScenarioLabel::hot;
  } else if (out.I_bar < opt.cold_threshold) {
    out.label = ScenarioLabel::cold;
  } else {
    out.label = ScenarioLabel::altered;
  }
  return out;
}

template <class Value>
ScenarioClassification classify(const Trajectory<Value>& traj, const ClassifyOptions& opt = {}) {
  return classify(std::span<const double>(traj.rho_C), std::span<const double>(traj.immune_score), opt);
}

// ---------------------------------------------------------------------------
// Peak counting
// ---------------------------------------------------------------------------

struct PeakOptions {
  double width_fraction = 0.05;  ///< smoothing width as a fraction of the site count
  std::size_t min_width = 3;
  double relative_height = 0.2;  ///< peaks below this fraction of the global maximum are ignored
};

/// Centred moving average; the window is truncated at the ends.
inline std::vector<double> moving_average(std::span<const double> v, std::size_t width) {
  const std::size_t n = v.size();
  const std::size_t half = width / 2;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

/// Strict local maxima of the smoothed profile that reach relative_height of
/// its global maximum. A run of equal values counts once when it is strictly
/// above the sites on either side, and an end site counts when it is strictly
/// above its only neighbour (the no-flux boundary mirrors the profile). A
/// constant profile has no peaks.
inline int count_peaks(std::span<const double> density, const PeakOptions& opt = {}) {
  const std::size_t n = density.size();
  if (n == 0) return 0;
  for (double v : density) {
    if (v < 0.0 || !std::isfinite(v)) throw DomainError("count_peaks needs a finite non-negative profile");
  }
  const auto width = std::max<std::size_t>(
      opt.min_width, static_cast<std::size_t>(std::llround(opt.width_fraction * static_cast<double>(n))));
  const std::vector<double> s = moving_average(density, width);
  const double top = *std::max_element(s.begin(), s.end());
  if (!(top > 0.0)) return 0;
  const double floor = opt.relative_height * top;
  int peaks = 0;
  for (std::size_t a = 0; a < n;) {
    std::size_t b = a;
    while (b + 1 < n && s[b + 1] == s[a]) ++b;
    const bool above_left = a == 0 || s[a] > s[a - 1];
    const bool above_right = b + 1 == n || s[b] > s[b + 1];
    if (above_left && above_right && !(a == 0 && b + 1 == n) && s[a] >= floor) ++peaks;
    a = b + 1;
  }
  return peaks;
}

}  // namespace coevo
