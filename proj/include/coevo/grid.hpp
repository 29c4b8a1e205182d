#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "coevo/errors.hpp"

namespace coevo {

/// Closed phenotype interval [lower, upper].
struct Window {
  double lower = 0.0;
  double upper = 0.0;

  double length() const noexcept { return upper - lower; }
};

/// Equally spaced lattice on [-L, L], inclusive of both endpoints.
///
/// Site i sits at -L + i * step with step = 2L / (n_sites - 1); the last
/// site is pinned to +L exactly. Distances between sites are measured in
/// index space (|i - k| * step) so that window membership does not flicker
/// with floating-point rounding.
class PhenotypeGrid {
 public:
  PhenotypeGrid(double half_width, std::size_t n_sites)
      : half_width_(half_width), n_sites_(n_sites) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
      throw ConfigError("grid half-width must be positive and finite");
    }
    if (n_sites < 2) {
      throw ConfigError("grid needs at least two sites");
    }
    step_ = 2.0 * half_width / static_cast<double>(n_sites - 1);
  }

  double half_width() const noexcept { return half_width_; }
  double length() const noexcept { return 2.0 * half_width_; }
  std::size_t size() const noexcept { return n_sites_; }
  double step() const noexcept { return step_; }

  double site(std::size_t i) const noexcept {
    if (i + 1 == n_sites_) return half_width_;
    return -half_width_ + static_cast<double>(i) * step_;
  }

  std::vector<double> sites() const {
    std::vector<double> out(n_sites_);
    for (std::size_t i = 0; i < n_sites_; ++i) out[i] = site(i);
    return out;
  }

  bool contains(double x) const noexcept {
    const double slack = 1e-12 * half_width_;
    return x >= -half_width_ - slack && x <= half_width_ + slack;
  }

  /// Largest index offset r with r * step <= xi.
  std::size_t reach(double xi) const {
    check_radius(xi);
    const double r = std::floor(xi / step_ + 1e-9);
    const auto max_offset = static_cast<double>(n_sites_ - 1);
    return static_cast<std::size_t>(std::min(r, max_offset));
  }

  Window window(double x, double xi) const {
    check_radius(xi);
    if (!std::isfinite(x) || !contains(x)) {
      throw DomainError("phenotype " + std::to_string(x) + " outside [-L, L]");
    }
    return {std::max(-half_width_, x - xi), std::min(half_width_, x + xi)};
  }

  Window window_at(std::size_t i, double xi) const { return window(site(i), xi); }

 private:
  static void check_radius(double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
      throw DomainError("kernel radius must be positive and finite");
    }
  }

  double half_width_;
  std::size_t n_sites_;
  double step_ = 0.0;
};

/// L_xi(x) = {y in [-L, L] : |y - x| <= xi}.
inline Window window(double x, double xi, const PhenotypeGrid& grid) {
  return grid.window(x, xi);
}

/// Truncated box kernel g(x, y; xi): 1/|L_xi(x)| on the window, zero outside.
/// Not symmetric in (x, y) near the boundary because the normaliser depends on x.
inline double kernel_weight(double x, double y, double xi, const PhenotypeGrid& grid) {
  const Window w = grid.window(x, xi);
  if (!std::isfinite(y) || !grid.contains(y)) {
    throw DomainError("phenotype " + std::to_string(y) + " outside [-L, L]");
  }
  const double slack = 1e-12 * std::max(1.0, grid.half_width());
  if (std::abs(y - x) > xi + slack) return 0.0;
  return 1.0 / w.length();
}

/// Index-space variant used by the field evaluators.
inline double kernel_weight(std::size_t i, std::size_t k, double xi, const PhenotypeGrid& grid) {
  const std::size_t r = grid.reach(xi);
  const std::size_t d = i > k ? i - k : k - i;
  if (d > r) return 0.0;
  return 1.0 / grid.window_at(i, xi).length();
}

}  // namespace coevo
