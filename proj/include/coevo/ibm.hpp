#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/grid.hpp"
#include "coevo/kernel.hpp"
#include "coevo/params.hpp"
#include "coevo/rng.hpp"
#include "coevo/state.hpp"
#include "coevo/trajectory.hpp"

namespace coevo {

/// Anything that can draw Binomial(n, p) variates. RngStream is the production
/// source; tests substitute scripted sources to force particular outcomes.
template <class R>
concept BinomialSource = requires(R& r, std::int64_t n, double p) {
  { r.binomial(n, p) } -> std::convertible_to<std::int64_t>;
};

/// N_i = round(n0(u_i) * step) for the cosine initial profiles.
inline CountState initialize_counts(const PhenotypeGrid& grid, const InitialCondition& init) {
  init.validate();
  CountState s;
  s.tumour.resize(grid.size());
  s.ctl.resize(grid.size());
  const double chi = grid.step();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid.site(i);
    s.tumour[i] = std::llround(init.tumour_density(u) * chi);
    s.ctl[i] = std::llround(init.ctl_density(u) * chi);
  }
  return s;
}

/// One phenotype random-walk step for tumour cells.
///
/// Per cell: stay with probability 1 - lambda, otherwise step left or right
/// with probability 1/2 each; steps leaving [-L, L] are aborted. Realised per
/// site as movers ~ Bin(N_i, lambda), left ~ Bin(movers, 1/2), which has the
/// same joint law as drawing r1 (and r2 when moving) for each cell. Sites are
/// visited in ascending order and all destinations are computed from the
/// pre-move counts.
template <BinomialSource Rng>
std::vector<std::int64_t> phenotype_move_step(std::span<const std::int64_t> tumour, double lambda_C,
                                              Rng& rng) {
  const std::size_t n = tumour.size();
  std::vector<std::int64_t> moved(n, 0);
  if (lambda_C <= 0.0) {
    moved.assign(tumour.begin(), tumour.end());
    return moved;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t count = tumour[i];
    if (count == 0) continue;
    const std::int64_t movers = rng.binomial(count, lambda_C);
    const std::int64_t left = rng.binomial(movers, 0.5);
    const std::int64_t right = movers - left;
    moved[i] += count - movers;
    if (i == 0) moved[i] += left; else moved[i - 1] += left;
    if (i + 1 == n) moved[i] += right; else moved[i + 1] += right;
  }
  return moved;
}

/// Division/death/quiescence probabilities per site for one population.
struct FateTable {
  std::vector<double> birth;
  std::vector<double> death;
  std::vector<double> quiescent;
};

struct FateProbabilities {
  FateTable tumour;
  FateTable ctl;
};

namespace detail {

inline void check_fates(const FateTable& f, std::span<const std::int64_t> counts, const char* population) {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double values[3] = {f.birth[i], f.death[i], f.quiescent[i]};
    const char* names[3] = {"birth", "death", "quiescence"};
    for (int k = 0; k < 3; ++k) {
      if (!(values[k] >= 0.0 && values[k] <= 1.0)) {
        std::ostringstream msg;
        msg << "time-step too large: population " << population << " site " << i << " " << names[k]
            << " probability " << values[k] << " outside [0, 1]";
        throw NumericError(msg.str());
      }
    }
  }
}

}  // namespace detail

/// Fate probabilities from the current (post-move) counts, fields in count mode.
/// Throws NumericError if any probability at an occupied site leaves [0, 1].
inline FateProbabilities fate_probabilities(const PhenotypeGrid& grid, const ModelParams& p,
                                            std::span<const std::int64_t> tumour,
                                            std::span<const std::int64_t> ctl) {
  const FieldSet f = compute_fields(grid, p, tumour, ctl, FieldMode::count);
  const std::size_t n = grid.size();
  FateProbabilities out;
  for (FateTable* t : {&out.tumour, &out.ctl}) {
    t->birth.resize(n);
    t->death.resize(n);
    t->quiescent.resize(n);
  }
  const double tau = p.tau;
  for (std::size_t i = 0; i < n; ++i) {
    out.tumour.birth[i] = tau * p.alpha_C;
    out.tumour.death[i] = tau * (p.mu_C * f.K_C[i] + p.zeta_C * p.gamma * f.J_C[i]);
    out.tumour.quiescent[i] = 1.0 - (out.tumour.birth[i] + out.tumour.death[i]);
    out.ctl.birth[i] = tau * (p.alpha_T + p.zeta_T * p.gamma * f.J_T[i]);
    out.ctl.death[i] = tau * p.mu_T * f.K_T[i];
    out.ctl.quiescent[i] = 1.0 - (out.ctl.birth[i] + out.ctl.death[i]);
  }
  detail::check_fates(out.tumour, tumour, "C");
  detail::check_fates(out.ctl, ctl, "T");
  return out;
}

/// Independent fate for every cell: death if r3 < P_d, division if
/// P_d <= r3 < P_d + P_b, quiescence otherwise. Realised per site as
/// deaths ~ Bin(N, P_d), divisions ~ Bin(N - deaths, P_b / (1 - P_d)).
/// Daughters are added to the same site and do not act until the next step.
template <BinomialSource Rng>
std::vector<std::int64_t> birth_death_step(std::span<const std::int64_t> counts, const FateTable& fates,
                                           Rng& rng) {
  std::vector<std::int64_t> next(counts.begin(), counts.end());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::int64_t n = counts[i];
    if (n == 0) continue;
    const double pd = fates.death[i];
    const std::int64_t deaths = rng.binomial(n, pd);
    std::int64_t births = 0;
    if (pd < 1.0) {
      const double pb = std::min(1.0, fates.birth[i] / (1.0 - pd));
      births = rng.binomial(n - deaths, pb);
    }
    next[i] = n - deaths + births;
  }
  return next;
}

/// One full agent step: move tumour cells, recount, then birth/death for C and T.
template <BinomialSource Rng>
void ibm_step(CountState& s, const PhenotypeGrid& grid, const ModelParams& p, Rng& rng) {
  s.tumour = phenotype_move_step(std::span<const std::int64_t>(s.tumour), p.lambda_C, rng);
  const FateProbabilities fates = fate_probabilities(grid, p, s.tumour, s.ctl);
  s.tumour = birth_death_step(std::span<const std::int64_t>(s.tumour), fates.tumour, rng);
  s.ctl = birth_death_step(std::span<const std::int64_t>(s.ctl), fates.ctl, rng);
  s.t += p.tau;
}

struct IbmOptions {
  std::vector<double> snapshot_times;
  /// Stop as soon as the tumour population is extinct. Off by default: the
  /// extinct state is absorbing for C, and the CTL series is still wanted to t_final.
  bool stop_on_extinction = false;
};

/// Runs the agent model from an explicit state. Rate parameters are not
/// re-validated here, which lets tests use degenerate settings (zero rates, lambda = 0).
inline IbmTrajectory run_ibm_from(const ModelParams& p, const PhenotypeGrid& grid, CountState s,
                                  std::uint64_t seed, const IbmOptions& options = {}) {
  if (s.tumour.size() != grid.size() || s.ctl.size() != grid.size()) {
    throw std::invalid_argument("state does not match grid");
  }
  RngStream rng(seed);
  const long long steps = p.steps();
  const auto snaps = snapshot_points(options.snapshot_times, p.tau, steps);
  IbmTrajectory traj;
  traj.tau = p.tau;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);

  auto observe = [&](long long h) {
    const auto rc = static_cast<double>(s.rho_C());
    const auto rt = static_cast<double>(s.rho_T());
    traj.record(static_cast<double>(h) * p.tau, rc, rt);
    for (const auto& sp : snaps) {
      if (sp.step == h) traj.snapshots.push_back({sp.t, s.tumour, s.ctl});
    }
    if (traj.terminal == Terminal::completed) {
      if (rc == 0.0) {
        traj.terminal = Terminal::tumour_extinct;
        traj.extinction_time = static_cast<double>(h) * p.tau;
      } else if (rt == 0.0) {
        traj.terminal = Terminal::ctl_extinct;
        traj.extinction_time = static_cast<double>(h) * p.tau;
      }
    }
  };

  s.t = 0.0;
  observe(0);
  for (long long h = 1; h <= steps; ++h) {
    if (options.stop_on_extinction && traj.terminal == Terminal::tumour_extinct) break;
    ibm_step(s, grid, p, rng);
    observe(h);
  }
  return traj;
}

/// Runs the agent model for round(t_final / tau) steps from the cosine initial condition.
inline IbmTrajectory run_ibm(const ModelParams& p, const PhenotypeGrid& grid, const InitialCondition& init,
                             std::uint64_t seed, const IbmOptions& options = {}) {
  p.validate(grid.length());
  CountState s = initialize_counts(grid, init);
  return run_ibm_from(p, grid, std::move(s), seed, options);
}

}  // namespace coevo
