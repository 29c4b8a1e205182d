#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "coevo/analysis.hpp"
#include "coevo/errors.hpp"
#include "coevo/grid.hpp"
#include "coevo/harness/config.hpp"
#include "coevo/harness/experiment.hpp"

namespace coevo::harness {

/// Closed-form results for one configuration.
struct AnalysisReport {
  double beta_C = 0.0;
  SteadyStates steady;
  EigenReport semitrivial;
  std::optional<EigenReport> nontrivial;
  std::optional<DispersionCurve> dispersion;
  std::optional<PatternBound> pattern;  ///< only when theta_C == theta_T lies in (0, L)
};

inline AnalysisReport analyze(const ExperimentConfig& c) {
  c.validate();
  const PhenotypeGrid grid = make_grid(c);
  const double length = grid.length();
  AnalysisReport r;
  r.beta_C = c.params.beta_C(grid.step());
  r.steady = steady_states(c.params, length);
  r.semitrivial = homogeneous_stability(c.params, SteadyKind::semitrivial);
  if (r.steady.nontrivial) {
    r.nontrivial = homogeneous_stability(c.params, SteadyKind::nontrivial);
    r.dispersion = dispersion(c.params, r.beta_C, length, c.max_mode);
    const double theta = c.params.theta_C;
    if (c.params.theta_T == theta && theta > 0.0 && theta < c.half_width) {
      r.pattern = pattern_bound(c.params, theta, r.beta_C, length, c.max_mode);
    }
  }
  return r;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline std::string num(double v) { return format_double(v); }

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError("cannot create output directory " + dir.string());
  }
}

inline void write_totals(const std::filesystem::path& path, const std::vector<double>& times,
                         const SeriesStats& rc, const SeriesStats& rt, const std::vector<double>& immune) {
  auto out = open_output(path);
  out << "time,rho_C_mean,rho_C_var,rho_T_mean,rho_T_var,I_mean\n";
  for (std::size_t h = 0; h < times.size(); ++h) {
    out << num(times[h]) << ',' << num(rc.mean[h]) << ',' << num(rc.var[h]) << ',' << num(rt.mean[h]) << ','
        << num(rt.var[h]) << ',' << num(immune[h]) << '\n';
  }
}

}  // namespace detail

inline void write_analysis(const AnalysisReport& r, const std::filesystem::path& dir) {
  using detail::num;
  detail::ensure_dir(dir);
  {
    auto out = detail::open_output(dir / "analysis.csv");
    out << "name,value\n";
    out << "beta_C," << num(r.beta_C) << '\n';
    out << "gamma_threshold," << num(r.steady.gamma_threshold) << '\n';
    out << "rho_C1," << num(r.steady.semitrivial.rho_C) << '\n';
    out << "rho_T1," << num(r.steady.semitrivial.rho_T) << '\n';
    out << "semitrivial_B," << num(r.semitrivial.B) << '\n';
    out << "semitrivial_C," << num(r.semitrivial.C) << '\n';
    out << "semitrivial_stable," << (r.semitrivial.stable ? 1 : 0) << '\n';
    out << "nontrivial_exists," << (r.steady.nontrivial ? 1 : 0) << '\n';
    if (r.steady.nontrivial) {
      out << "rho_C2," << num(r.steady.nontrivial->rho_C) << '\n';
      out << "rho_T2," << num(r.steady.nontrivial->rho_T) << '\n';
      out << "nontrivial_B," << num(r.nontrivial->B) << '\n';
      out << "nontrivial_C," << num(r.nontrivial->C) << '\n';
      out << "nontrivial_stable," << (r.nontrivial->stable ? 1 : 0) << '\n';
      out << "dispersion_within_validity," << (r.dispersion->within_validity ? 1 : 0) << '\n';
    }
    if (r.pattern) {
      out << "pattern_mode_count," << r.pattern->modes.size() << '\n';
      if (r.pattern->bound) {
        out << "pattern_bound," << num(*r.pattern->bound) << '\n';
        out << "pattern_argmin_mode," << *r.pattern->argmin_mode << '\n';
      }
      out << "pattern_condition_met," << (r.pattern->verdict ? 1 : 0) << '\n';
    }
  }
  if (r.dispersion) {
    auto out = detail::open_output(dir / "dispersion.csv");
    out << "m,k,B,C,re_lambda_max\n";
    for (const auto& m : r.dispersion->modes) {
      out << m.m << ',' << num(m.k) << ',' << num(m.B) << ',' << num(m.C) << ',' << num(m.re_lambda_max) << '\n';
    }
  }
}

inline std::string snapshot_file_name(double t) { return "snapshot_" + detail::format_double(t) + ".csv"; }

/// Writes totals.csv (agent statistics, or the PDE series when only the PDE
/// ran), totals_pde.csv when both engines ran, snapshot_<t>.csv, summary.csv,
/// config.resolved and the analysis files. Existing files are overwritten.
inline void export_result(const AggregateResult& result, const std::filesystem::path& dir) {
  using detail::num;
  detail::ensure_dir(dir);
  const PhenotypeGrid grid = make_grid(result.config);

  {
    auto out = detail::open_output(dir / "config.resolved");
    out << serialize(result.config);
  }

  const bool have_ibm = !result.times.empty();
  if (result.pde) {
    const PdeTrajectory& p = *result.pde;
    const SeriesStats rc{p.rho_C, std::vector<double>(p.rho_C.size(), 0.0)};
    const SeriesStats rt{p.rho_T, std::vector<double>(p.rho_T.size(), 0.0)};
    detail::write_totals(dir / (have_ibm ? "totals_pde.csv" : "totals.csv"), p.times, rc, rt, p.immune_score);
  }
  if (have_ibm) detail::write_totals(dir / "totals.csv", result.times, result.rho_C, result.rho_T, result.immune_mean);

  std::vector<double> snap_times;
  if (have_ibm) {
    for (const auto& s : result.snapshots) snap_times.push_back(s.t);
  } else if (result.pde) {
    for (const auto& s : result.pde->snapshots) snap_times.push_back(s.t);
  }
  for (std::size_t k = 0; k < snap_times.size(); ++k) {
    const double t = snap_times[k];
    const Snapshot<double>* pde_snap = nullptr;
    if (result.pde) {
      for (const auto& s : result.pde->snapshots) {
        if (s.t == t) pde_snap = &s;
      }
    }
    auto out = detail::open_output(dir / snapshot_file_name(t));
    out << "site_index,u";
    if (have_ibm) out << ",nC_mean,nC_var,nT_mean,nT_var";
    if (pde_snap) out << ",nC_pde,nT_pde";
    out << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << i << ',' << num(grid.site(i));
      if (have_ibm) {
        const SnapshotStats& s = result.snapshots[k];
        out << ',' << num(s.tumour.mean[i]) << ',' << num(s.tumour.var[i]) << ',' << num(s.ctl.mean[i]) << ','
            << num(s.ctl.var[i]);
      }
      if (pde_snap) out << ',' << num(pde_snap->tumour[i]) << ',' << num(pde_snap->ctl[i]);
      out << '\n';
    }
  }

  {
    auto out = detail::open_output(dir / "summary.csv");
    out << "name,value\n";
    for (std::size_t i = 0; i < result.replicates.size(); ++i) {
      const ReplicateOutcome& r = result.replicates[i];
      const std::string prefix = "replicate_" + std::to_string(i) + "_";
      out << prefix << "seed," << r.seed << '\n';
      if (!r.ok) {
        out << prefix << "error,\"" << r.error << "\"\n";
        continue;
      }
      out << prefix << "I_bar," << num(r.classification.I_bar) << '\n';
      out << prefix << "label," << to_string(r.classification.label) << '\n';
      out << prefix << "terminal," << to_string(r.terminal) << '\n';
      if (r.extinction_time) out << prefix << "extinction_time," << num(*r.extinction_time) << '\n';
    }
    if (result.majority_label) out << "ibm_majority_label," << to_string(*result.majority_label) << '\n';
    if (result.pde_classification) {
      out << "pde_I_bar," << num(result.pde_classification->I_bar) << '\n';
      out << "pde_label," << to_string(result.pde_classification->label) << '\n';
      out << "pde_cfl," << num(result.pde->cfl) << '\n';
      out << "pde_min_density," << num(result.pde->min_density) << '\n';
    }
    const PeakOptions& po = result.config.peaks;
    for (const auto& s : result.snapshots) {
      out << "ibm_peaks_C_t" << num(s.t) << ',' << count_peaks(s.tumour.mean, po) << '\n';
    }
    if (result.pde) {
      for (const auto& s : result.pde->snapshots) {
        out << "pde_peaks_C_t" << num(s.t) << ',' << count_peaks(s.tumour, po) << '\n';
      }
    }
    if (result.comparison) {
      const ComparisonMetrics& c = *result.comparison;
      out << "total_error_C," << num(c.total_error_C) << '\n';
      out << "total_error_T," << num(c.total_error_T) << '\n';
      for (std::size_t k = 0; k < c.snapshot_times.size(); ++k) {
        out << "l1_C_t" << num(c.snapshot_times[k]) << ',' << num(c.l1_C[k]) << '\n';
        out << "l1_T_t" << num(c.snapshot_times[k]) << ',' << num(c.l1_T[k]) << '\n';
      }
    }
  }

  write_analysis(analyze(result.config), dir);
}

}  // namespace coevo::harness
