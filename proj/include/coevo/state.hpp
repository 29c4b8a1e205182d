#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace coevo {

/// Per-site cell numbers of the agent engine.
struct CountState {
  double t = 0.0;
  std::vector<std::int64_t> tumour;
  std::vector<std::int64_t> ctl;

  std::int64_t rho_C() const { return std::accumulate(tumour.begin(), tumour.end(), std::int64_t{0}); }
  std::int64_t rho_T() const { return std::accumulate(ctl.begin(), ctl.end(), std::int64_t{0}); }
};

/// Per-site densities of the continuum engine. Totals are step-weighted sums.
struct DensityState {
  double t = 0.0;
  double step = 0.0;
  std::vector<double> tumour;
  std::vector<double> ctl;

  double rho_C() const { return step * std::accumulate(tumour.begin(), tumour.end(), 0.0); }
  double rho_T() const { return step * std::accumulate(ctl.begin(), ctl.end(), 0.0); }
};

}  // namespace coevo
