#pragma once

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/grid.hpp"
#include "coevo/params.hpp"

namespace coevo {

enum class FieldKind { K_C, K_T, J_C, J_T };

/// How a source vector is interpreted: cell counts per site, or densities
/// integrated with the Riemann weight step.
enum class FieldMode { count, density };

struct KernelField {
  std::vector<double> values;
  double radius = 0.0;
  FieldKind kind = FieldKind::K_C;
};

/// value_i = sum_k g(x_i, x_k; xi) * source_k, times the grid step in density mode.
///
/// g is a box kernel, so each value is a window sum; windows are evaluated from
/// a prefix sum in O(n) total. Integer sources are summed exactly.
template <class Amount>
KernelField nonlocal_field(const PhenotypeGrid& grid, std::span<const Amount> source, double xi,
                           FieldMode mode, FieldKind kind = FieldKind::K_C) {
  const std::size_t n = grid.size();
  if (source.size() != n) {
    throw std::invalid_argument("source has " + std::to_string(source.size()) +
                                " sites, grid has " + std::to_string(n));
  }
  using Acc = std::conditional_t<std::is_integral_v<Amount>, std::int64_t, double>;
  std::vector<Acc> prefix(n + 1, Acc{0});
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + static_cast<Acc>(source[k]);

  const std::size_t r = grid.reach(xi);
  const double weight = mode == FieldMode::density ? grid.step() : 1.0;
  KernelField field{std::vector<double>(n), xi, kind};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= r ? i - r : 0;
    const std::size_t hi = std::min(n - 1, i + r);
    const auto sum = static_cast<double>(prefix[hi + 1] - prefix[lo]);
    field.values[i] = weight * sum / grid.window_at(i, xi).length();
  }
  return field;
}

template <class Amount>
KernelField nonlocal_field(const PhenotypeGrid& grid, const std::vector<Amount>& source, double xi,
                           FieldMode mode, FieldKind kind = FieldKind::K_C) {
  return nonlocal_field(grid, std::span<const Amount>(source), xi, mode, kind);
}

/// The four nonlocal quantities driving both engines.
struct FieldSet {
  std::vector<double> K_C;  ///< tumour competition felt by tumour cells
  std::vector<double> K_T;  ///< CTL self-regulation felt by CTLs
  std::vector<double> J_C;  ///< CTLs recognising each tumour phenotype
  std::vector<double> J_T;  ///< tumour cells recognised by each CTL phenotype
};

template <class Amount>
FieldSet compute_fields(const PhenotypeGrid& grid, const ModelParams& p,
                        std::span<const Amount> tumour, std::span<const Amount> ctl, FieldMode mode) {
  return {
      nonlocal_field(grid, tumour, p.theta_C, mode, FieldKind::K_C).values,
      nonlocal_field(grid, ctl, p.theta_T, mode, FieldKind::K_T).values,
      nonlocal_field(grid, ctl, p.eta, mode, FieldKind::J_C).values,
      nonlocal_field(grid, tumour, p.eta, mode, FieldKind::J_T).values,
  };
}

}  // namespace coevo
