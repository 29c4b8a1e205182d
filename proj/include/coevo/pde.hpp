#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/grid.hpp"
#include "coevo/kernel.hpp"
#include "coevo/params.hpp"
#include "coevo/state.hpp"
#include "coevo/trajectory.hpp"

namespace coevo {

/// Net per-capita growth rates:
///   R_C = alpha_C - mu_C K_C - zeta_C gamma J_C
///   R_T = alpha_T + zeta_T gamma J_T - mu_T K_T
struct ReactionTerms {
  std::vector<double> R_C;
  std::vector<double> R_T;
};

/// Reaction rates with the nonlocal fields taken in density mode from `s`.
inline ReactionTerms reaction_terms(const PhenotypeGrid& grid, const ModelParams& p, const DensityState& s) {
  const FieldSet f = compute_fields(grid, p, std::span<const double>(s.tumour),
                                    std::span<const double>(s.ctl), FieldMode::density);
  ReactionTerms r{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    r.R_C[i] = p.alpha_C - p.mu_C * f.K_C[i] - p.zeta_C * p.gamma * f.J_C[i];
    r.R_T[i] = p.alpha_T + p.zeta_T * p.gamma * f.J_T[i] - p.mu_T * f.K_T[i];
  }
  return r;
}

/// n <- n (1 + dt R+) / (1 + dt R-), with R+ = max(R, 0) and R- = max(-R, 0).
/// Positivity-preserving for any dt.
inline void apply_reaction(std::span<double> density, std::span<const double> rate, double dt) {
  if (density.size() != rate.size()) throw std::invalid_argument("rate/density size mismatch");
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double up = std::max(rate[i], 0.0);
    const double down = std::max(-rate[i], 0.0);
    density[i] *= (1.0 + dt * up) / (1.0 + dt * down);
  }
}

/// Reaction sub-step for both populations with fields from the incoming state.
inline DensityState reaction_update(const DensityState& s, const ModelParams& p, const PhenotypeGrid& grid,
                                    double dt) {
  const ReactionTerms r = reaction_terms(grid, p, s);
  DensityState out = s;
  apply_reaction(out.tumour, r.R_C, dt);
  apply_reaction(out.ctl, r.R_T, dt);
  return out;
}

/// beta dt / dx^2 for the explicit three-point Laplacian.
inline double diffusion_number(double beta_C, double dt, const PhenotypeGrid& grid) {
  return beta_C * dt / (grid.step() * grid.step());
}

/// Explicit three-point diffusion on interior sites, then zero-gradient
/// boundary rows: the left end copies its right neighbour and the right end
/// copies its left neighbour (both already updated).
inline std::vector<double> diffusion_update(std::span<const double> density, double beta_C, double dt,
                                            const PhenotypeGrid& grid) {
  const std::size_t n = density.size();
  if (n != grid.size()) throw std::invalid_argument("density does not match grid");
  std::vector<double> next(density.begin(), density.end());
  if (beta_C == 0.0 || n < 3) return next;
  const double r = diffusion_number(beta_C, dt, grid);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    next[i] = density[i] + r * (density[i + 1] - 2.0 * density[i] + density[i - 1]);
  }
  next[0] = next[1];
  next[n - 1] = next[n - 2];
  return next;
}

/// One split step: tumour reaction, tumour diffusion (with boundary rows),
/// CTL reaction. All four fields come from the state at the start of the step.
inline DensityState pde_step(const DensityState& s, const ModelParams& p, const PhenotypeGrid& grid, double dt,
                             double beta_C) {
  const ReactionTerms r = reaction_terms(grid, p, s);
  DensityState out = s;
  apply_reaction(out.tumour, r.R_C, dt);
  out.tumour = diffusion_update(out.tumour, beta_C, dt, grid);
  apply_reaction(out.ctl, r.R_T, dt);
  out.t = s.t + dt;
  return out;
}

inline DensityState initialize_densities(const PhenotypeGrid& grid, const InitialCondition& init) {
  init.validate();
  DensityState s;
  s.step = grid.step();
  s.tumour.resize(grid.size());
  s.ctl.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.tumour[i] = init.tumour_density(grid.site(i));
    s.ctl[i] = init.ctl_density(grid.site(i));
  }
  return s;
}

struct PdeOptions {
  /// Time step; defaults to the agent time step tau.
  std::optional<double> dt;
  /// Diffusion coefficient; defaults to lambda_C * step^2 / (2 tau).
  std::optional<double> beta_C;
  std::vector<double> snapshot_times;
};

/// Marches from an explicit state to t_final. Throws ConfigError if the
/// explicit diffusion step is unstable (beta dt / dx^2 > 1/2).
inline PdeTrajectory run_pde_from(const ModelParams& p, const PhenotypeGrid& grid, DensityState s,
                                  const PdeOptions& options = {}) {
  if (s.tumour.size() != grid.size() || s.ctl.size() != grid.size()) {
    throw std::invalid_argument("state does not match grid");
  }
  const double dt = options.dt.value_or(p.tau);
  if (!(dt > 0.0)) throw ConfigError("pde time step must be positive");
  const double beta = options.beta_C.value_or(p.beta_C(grid.step()));
  PdeTrajectory traj;
  traj.tau = dt;
  traj.beta_C = beta;
  traj.cfl = diffusion_number(beta, dt, grid);
  if (traj.cfl > 0.5) {
    std::ostringstream msg;
    msg << "diffusion number beta_C dt / dx^2 = " << traj.cfl << " exceeds 1/2";
    throw ConfigError(msg.str());
  }
  const long long steps = std::llround(p.t_final / dt);
  const auto snaps = snapshot_points(options.snapshot_times, dt, steps);
  s.step = grid.step();
  s.t = 0.0;

  auto observe = [&](long long h) {
    const double rc = s.rho_C();
    traj.record(static_cast<double>(h) * dt, rc, s.rho_T());
    for (const auto& sp : snaps) {
      if (sp.step == h) traj.snapshots.push_back({sp.t, s.tumour, s.ctl});
    }
    for (double v : s.tumour) traj.min_density = std::min(traj.min_density, v);
    for (double v : s.ctl) traj.min_density = std::min(traj.min_density, v);
  };

  observe(0);
  for (long long h = 1; h <= steps; ++h) {
    s = pde_step(s, p, grid, dt, beta);
    observe(h);
  }
  if (traj.rho_C.back() < 1.0) {
    traj.terminal = Terminal::tumour_extinct;
    for (std::size_t h = 0; h < traj.rho_C.size(); ++h) {
      if (traj.rho_C[h] < 1.0) {
        traj.extinction_time = traj.times[h];
        break;
      }
    }
  }
  return traj;
}

/// Continuum run from the cosine initial condition.
inline PdeTrajectory run_pde(const ModelParams& p, const PhenotypeGrid& grid, const InitialCondition& init,
                             const PdeOptions& options = {}) {
  p.validate(grid.length());
  return run_pde_from(p, grid, initialize_densities(grid, init), options);
}

}  // namespace coevo
