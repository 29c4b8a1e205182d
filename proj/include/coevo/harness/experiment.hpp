#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "coevo/analysis.hpp"
#include "coevo/errors.hpp"
#include "coevo/grid.hpp"
#include "coevo/harness/config.hpp"
#include "coevo/ibm.hpp"
#include "coevo/pde.hpp"

namespace coevo::harness {

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> var;  ///< unbiased sample variance; 0 with a single sample
};

/// Running mean/variance (Welford) per index over a set of equal-length series.
class SeriesAccumulator {
 public:
  void add(const std::vector<double>& x) {
    if (count_ == 0) {
      mean_.assign(x.size(), 0.0);
      m2_.assign(x.size(), 0.0);
    }
    if (x.size() != mean_.size()) throw std::invalid_argument("series length mismatch");
    ++count_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mean_[i];
      mean_[i] += d / static_cast<double>(count_);
      m2_[i] += d * (x[i] - mean_[i]);
    }
  }

  std::size_t count() const noexcept { return count_; }

  SeriesStats stats() const {
    SeriesStats s{mean_, std::vector<double>(mean_.size(), 0.0)};
    if (count_ > 1) {
      for (std::size_t i = 0; i < m2_.size(); ++i) s.var[i] = std::max(0.0, m2_[i] / static_cast<double>(count_ - 1));
    }
    return s;
  }

 private:
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

struct SnapshotStats {
  double t = 0.0;
  SeriesStats tumour;  ///< densities N / step
  SeriesStats ctl;
};

struct ReplicateOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  ScenarioClassification classification;
  Terminal terminal = Terminal::completed;
  std::optional<double> extinction_time;
};

struct ComparisonMetrics {
  std::vector<double> snapshot_times;
  /// sum |n_ibm - n_pde| dx / sum n_pde dx at each snapshot
  std::vector<double> l1_C;
  std::vector<double> l1_T;
  double total_error_C = 0.0;  ///< |rho_ibm - rho_pde| / rho_pde at t_final
  double total_error_T = 0.0;
};

struct AggregateResult {
  ExperimentConfig config;
  std::vector<double> times;
  SeriesStats rho_C;
  SeriesStats rho_T;
  /// Mean immune score over replicates with a surviving tumour; NaN if none.
  std::vector<double> immune_mean;
  std::vector<SnapshotStats> snapshots;
  std::vector<ReplicateOutcome> replicates;
  std::optional<ScenarioLabel> majority_label;
  std::optional<PdeTrajectory> pde;
  std::optional<ScenarioClassification> pde_classification;
  std::optional<ComparisonMetrics> comparison;

  bool ibm_ran() const { return !replicates.empty(); }
  std::size_t failed_replicates() const {
    return static_cast<std::size_t>(std::count_if(replicates.begin(), replicates.end(),
                                                  [](const ReplicateOutcome& r) { return !r.ok; }));
  }
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to slot i so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

inline PhenotypeGrid make_grid(const ExperimentConfig& c) { return PhenotypeGrid(c.half_width, c.n_sites); }

/// IBM replicates use seeds seed, seed + 1, ...; the PDE runs once. Failed
/// replicates are reported in `replicates` and left out of the statistics.
inline AggregateResult run_experiment(const ExperimentConfig& config, unsigned workers = 1) {
  config.validate();
  const PhenotypeGrid grid = make_grid(config);
  AggregateResult result;
  result.config = config;
  const ClassifyOptions ibm_classify{config.hot_threshold, 1.0, 1.0};

  if (config.engine != Engine::pde) {
    const auto n = static_cast<std::size_t>(config.replicates);
    std::vector<std::optional<IbmTrajectory>> runs(n);
    result.replicates.resize(n);
    parallel_for(n, workers, [&](std::size_t i) {
      ReplicateOutcome& out = result.replicates[i];
      out.seed = config.seed + i;
      try {
        runs[i] = run_ibm(config.params, grid, config.init, out.seed, {config.snapshot_times, false});
        out.ok = true;
        out.classification = classify(*runs[i], ibm_classify);
        out.terminal = runs[i]->terminal;
        out.extinction_time = runs[i]->extinction_time;
      } catch (const NumericError& e) {
        out.error = e.what();
      }
    });

    SeriesAccumulator rc, rt;
    std::vector<SeriesAccumulator> snap_c, snap_t;
    std::vector<double> immune_sum;
    std::vector<std::size_t> immune_n;
    std::map<ScenarioLabel, int> votes;
    const double chi = grid.step();
    for (std::size_t i = 0; i < n; ++i) {
      if (!runs[i]) continue;
      const IbmTrajectory& tr = *runs[i];
      if (result.times.empty()) {
        result.times = tr.times;
        snap_c.resize(tr.snapshots.size());
        snap_t.resize(tr.snapshots.size());
        immune_sum.assign(tr.times.size(), 0.0);
        immune_n.assign(tr.times.size(), 0);
        for (const auto& s : tr.snapshots) result.snapshots.push_back({s.t, {}, {}});
      }
      rc.add(tr.rho_C);
      rt.add(tr.rho_T);
      for (std::size_t h = 0; h < tr.immune_score.size(); ++h) {
        if (std::isfinite(tr.immune_score[h])) {
          immune_sum[h] += tr.immune_score[h];
          ++immune_n[h];
        }
      }
      for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        std::vector<double> c(tr.snapshots[k].tumour.size()), t(tr.snapshots[k].ctl.size());
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = static_cast<double>(tr.snapshots[k].tumour[j]) / chi;
        for (std::size_t j = 0; j < t.size(); ++j) t[j] = static_cast<double>(tr.snapshots[k].ctl[j]) / chi;
        snap_c[k].add(c);
        snap_t[k].add(t);
      }
      ++votes[result.replicates[i].classification.label];
    }
    if (rc.count() > 0) {
      result.rho_C = rc.stats();
      result.rho_T = rt.stats();
      result.immune_mean.resize(immune_sum.size());
      for (std::size_t h = 0; h < immune_sum.size(); ++h) {
        result.immune_mean[h] = immune_n[h] > 0 ? immune_sum[h] / static_cast<double>(immune_n[h])
                                                : std::nan("");
      }
      for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
        result.snapshots[k].tumour = snap_c[k].stats();
        result.snapshots[k].ctl = snap_t[k].stats();
      }
      int best = -1;
      for (const auto& [label, count] : votes) {
        if (count > best) {
          best = count;
          result.majority_label = label;
        }
      }
    }
  }

  if (config.engine != Engine::ibm) {
    PdeOptions opt;
    opt.snapshot_times = config.snapshot_times;
    result.pde = run_pde(config.params, grid, config.init, opt);
    result.pde_classification = classify(*result.pde, ClassifyOptions{config.hot_threshold, 1.0, 1.0});
  }

  if (result.pde && !result.times.empty()) {
    ComparisonMetrics cm;
    const double dx = grid.step();
    for (const auto& ibm_snap : result.snapshots) {
      for (const auto& pde_snap : result.pde->snapshots) {
        if (pde_snap.t != ibm_snap.t) continue;
        auto l1 = [dx](const std::vector<double>& a, const std::vector<double>& ref) {
          double num = 0.0, den = 0.0;
          for (std::size_t j = 0; j < ref.size(); ++j) {
            num += std::abs(a[j] - ref[j]) * dx;
            den += ref[j] * dx;
          }
          return den > 0.0 ? num / den : std::nan("");
        };
        cm.snapshot_times.push_back(ibm_snap.t);
        cm.l1_C.push_back(l1(ibm_snap.tumour.mean, pde_snap.tumour));
        cm.l1_T.push_back(l1(ibm_snap.ctl.mean, pde_snap.ctl));
      }
    }
    const double pc = result.pde->rho_C.back();
    const double pt = result.pde->rho_T.back();
    cm.total_error_C = std::abs(result.rho_C.mean.back() - pc) / pc;
    cm.total_error_T = std::abs(result.rho_T.mean.back() - pt) / pt;
    result.comparison = cm;
  }
  return result;
}

}  // namespace coevo::harness
