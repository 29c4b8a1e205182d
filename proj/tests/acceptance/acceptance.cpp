// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "coevo/analysis.hpp"
#include "coevo/harness/experiment.hpp"
#include "coevo/harness/presets.hpp"
#include "coevo/ibm.hpp"
#include "coevo/kernel.hpp"

using namespace coevo;
using namespace coevo::harness;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Coexistence totals on |I| = 2, evaluated independently of the library.
std::pair<double, double> coexistence(const ModelParams& p) {
  const double gC = p.zeta_C * p.gamma, gT = p.zeta_T * p.gamma;
  const double d = gC * gT + p.mu_C * p.mu_T;
  return {2.0 * (p.alpha_C * p.mu_T - p.alpha_T * gC) / d, 2.0 * (p.alpha_T * p.mu_C + p.alpha_C * gT) / d};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_ibm_ibar(const AggregateResult& r) {
  double s = 0.0;
  int n = 0;
  for (const auto& rep : r.replicates) {
    if (!rep.ok) continue;
    s += rep.classification.I_bar;
    ++n;
  }
  return n ? s / n : std::nan("");
}

const std::vector<double>* snapshot_at(const std::vector<Snapshot<double>>& snaps, double t) {
  for (const auto& s : snaps) {
    if (s.t == t) return &s.tumour;
  }
  return nullptr;
}

const SnapshotStats* snapshot_at(const std::vector<SnapshotStats>& snaps, double t) {
  for (const auto& s : snaps) {
    if (s.t == t) return &s;
  }
  return nullptr;
}

Verdict eradication() {
  ExperimentConfig c = preset("fig1a");
  c.replicates = 5;
  const auto t0 = std::chrono::steady_clock::now();
  const AggregateResult r = run_experiment(c);
  const double per_replicate = seconds_since(t0) / c.replicates;
  Verdict v;
  const double rc = r.pde->rho_C.back(), rt = r.pde->rho_T.back();
  v.require(rc < 1.0, fmt("PDE rho_C(30)=%.3g", rc));
  v.require(rel(rt, 2e5) < 0.01, fmt("PDE rho_T(30)=%.6g", rt));
  int extinct = 0;
  for (const auto& rep : r.replicates) extinct += rep.ok && rep.terminal == Terminal::tumour_extinct;
  v.require(extinct >= 4, "IBM extinct " + std::to_string(extinct) + "/5");
  v.require(rel(r.rho_T.mean.back(), 2e5) < 0.05, fmt("IBM rho_T(30)=%.6g", r.rho_T.mean.back()));
  v.require(per_replicate < 60.0, fmt("%.2f s per replicate", per_replicate));
  return v;
}

struct Fig1Runs {
  AggregateResult b, c, d;
};

const Fig1Runs& fig1_runs() {
  static const Fig1Runs runs{run_experiment(preset("fig1b")), run_experiment(preset("fig1c")),
                             run_experiment(preset("fig1d"))};
  return runs;
}

Verdict coexistence_totals() {
  const Fig1Runs& f = fig1_runs();
  Verdict v;
  for (const auto* r : {&f.b, &f.c, &f.d}) {
    const auto [ec, et] = coexistence(r->config.params);
    const std::string tag = r->config.output_dir.substr(4);
    const double pc = r->pde->rho_C.back(), pt = r->pde->rho_T.back();
    const double ic = r->rho_C.mean.back(), it = r->rho_T.mean.back();
    v.require(rel(pc, ec) < 0.01 && rel(pt, et) < 0.01,
              tag + fmt(" PDE err (%.2e,", rel(pc, ec)) + fmt(" %.2e)", rel(pt, et)));
    v.require(rel(ic, ec) < 0.05 && rel(it, et) < 0.05,
              tag + fmt(" IBM err (%.3f,", rel(ic, ec)) + fmt(" %.3f)", rel(it, et)));
  }
  return v;
}

Verdict immune_scores() {
  const Fig1Runs& f = fig1_runs();
  struct Target {
    const AggregateResult* r;
    ScenarioLabel label;
    double centre, tol;
  };
  Verdict v;
  for (const Target& t : {Target{&f.b, ScenarioLabel::hot, 12.7, 1.0}, Target{&f.c, ScenarioLabel::altered, 1.6, 0.4},
                          Target{&f.d, ScenarioLabel::cold, 0.7, 0.2}}) {
    const std::string tag = t.r->config.output_dir.substr(4);
    const auto& pde = *t.r->pde_classification;
    v.require(pde.label == t.label && std::abs(pde.I_bar - t.centre) <= t.tol,
              tag + " PDE " + std::string(to_string(pde.label)) + fmt(" I=%.3f", pde.I_bar));
    const double ibar = mean_ibm_ibar(*t.r);
    v.require(t.r->majority_label == t.label && std::abs(ibar - t.centre) <= t.tol,
              tag + " IBM " + std::string(to_string(*t.r->majority_label)) + fmt(" I=%.3f", ibar));
  }
  return v;
}

Verdict pattern_monotonicity() {
  Verdict v;
  std::vector<int> pde_peaks;
  for (const char* name : {"fig2a", "fig2b", "fig2c"}) {
    const AggregateResult r = run_experiment(preset(name));
    const auto* pde = snapshot_at(r.pde->snapshots, 30.0);
    const auto* ibm = snapshot_at(r.snapshots, 30.0);
    const int p = count_peaks(*pde);
    const int q = count_peaks(ibm->tumour.mean);
    pde_peaks.push_back(p);
    v.require(std::abs(p - q) <= 1, std::string(name) + " peaks PDE " + std::to_string(p) + " IBM " + std::to_string(q));
  }
  v.require(pde_peaks[0] < pde_peaks[1] && pde_peaks[1] < pde_peaks[2], "PDE peak count strictly increasing");
  return v;
}

Verdict pattern_condition() {
  const ExperimentConfig c = preset("fig2b");
  const ModelParams& p = c.params;
  const PhenotypeGrid g = make_grid(c);
  const double beta = p.lambda_C * g.step() * g.step() / (2.0 * p.tau);
  const PatternBound pb = pattern_bound(p, p.theta_C, beta, 2.0, 100);
  const DispersionCurve d = dispersion(p, beta, 2.0, 100);

  // brute-force scan of the negative-sine set
  std::vector<int> scan;
  for (int m = 1; m <= 100; ++m) {
    if (std::sin(m * std::numbers::pi / 2.0 * p.theta_C) < -1e-12) scan.push_back(m);
  }
  double best = -INFINITY;
  for (const auto& mode : d.modes) {
    if (std::find(scan.begin(), scan.end(), mode.m) != scan.end()) best = std::max(best, mode.re_lambda_max);
  }
  Verdict v;
  v.require(pb.modes == scan, "mode set matches scan (" + std::to_string(scan.size()) + " modes)");
  v.require(pb.bound && *pb.bound > 0.0 && *pb.bound > beta,
            fmt("bound %.4e vs beta_C %.4e", pb.bound.value_or(NAN), beta) + " at m=" +
                std::to_string(pb.argmin_mode.value_or(-1)));
  v.require(best > 0.0, fmt("max Re lambda over K = %.4g", best));
  return v;
}

Verdict stability_oracle() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto around = [&](double x) { return x * std::pow(10.0, 2.0 * u(gen) - 1.0); };
  double worst = 0.0;
  int equivalence_failures = 0, coexisting = 0;
  const int draws = 1000;
  for (int k = 0; k < draws; ++k) {
    ModelParams p;
    p.alpha_C = around(1.5);
    p.alpha_T = around(0.05);
    p.mu_C = around(1.5e-6);
    p.mu_T = around(5e-6);
    p.zeta_C = around(5e-6);
    p.zeta_T = around(3e-5);
    p.gamma = 0.1 + 3.4 * u(gen);
    p.eta = p.theta_C = p.theta_T = 1.0;
    const double gC = p.zeta_C * p.gamma, gT = p.zeta_T * p.gamma;
    auto compare = [&](const EigenReport& r, double c, double t) {
      Eigen::Matrix2d J;
      J << p.alpha_C - 2 * p.mu_C * c - gC * t, -gC * c, gT * t, p.alpha_T + gT * c - 2 * p.mu_T * t;
      const Eigen::Vector2cd ev = Eigen::EigenSolver<Eigen::Matrix2d>(J).eigenvalues();
      const std::complex<double> lib[2] = {r.lambda_plus, r.lambda_minus};
      for (int i = 0; i < 2; ++i) {
        const double e = std::min(std::abs(lib[i] - ev[0]), std::abs(lib[i] - ev[1]));
        worst = std::max(worst, e);
      }
    };
    const SteadyStates ss = steady_states(p, 1.0);
    const EigenReport semi = homogeneous_stability(p, SteadyKind::semitrivial);
    compare(semi, 0.0, p.alpha_T / p.mu_T);
    const double gamma_star = (p.mu_T / p.alpha_T) * (p.alpha_C / p.zeta_C);
    const bool below = p.gamma < gamma_star;
    if (below != ss.nontrivial.has_value() || below == semi.stable) ++equivalence_failures;
    if (ss.nontrivial) {
      ++coexisting;
      compare(homogeneous_stability(p, SteadyKind::nontrivial), ss.nontrivial->rho_C, ss.nontrivial->rho_T);
    }
  }
  Verdict v;
  v.require(worst < 1e-8, fmt("max |root - oracle| = %.2e", worst));
  v.require(equivalence_failures == 0, std::to_string(equivalence_failures) + " equivalence violations in " +
                                           std::to_string(draws) + " draws (" + std::to_string(coexisting) +
                                           " coexisting)");
  return v;
}

Verdict master_equation() {
  const PhenotypeGrid g(1.0, 5);
  ModelParams p;
  p.gamma = 1.0;
  p.eta = p.theta_C = p.theta_T = 2.0;  // windows span the domain, so fields are move-invariant
  p.mu_C = 2e-3;
  p.mu_T = 1e-3;
  p.zeta_C = 1e-3;
  p.zeta_T = 2e-3;
  p.lambda_C = 0.1;
  const CountState s0{0.0, {30, 50, 70, 50, 30}, {20, 40, 20, 40, 20}};

  const double KC = 230.0 / 2.0, KT = 140.0 / 2.0;
  const double growth_C = 1.0 + p.tau * (p.alpha_C - p.mu_C * KC - p.zeta_C * p.gamma * KT);
  const double growth_T = 1.0 + p.tau * (p.alpha_T + p.zeta_T * p.gamma * KC - p.mu_T * KT);
  std::vector<double> expected(10);
  for (int i = 0; i < 5; ++i) {
    const double stay = (1.0 - p.lambda_C) * s0.tumour[i] + (i == 0 || i == 4 ? 0.5 * p.lambda_C * s0.tumour[i] : 0.0);
    const double in = 0.5 * p.lambda_C * ((i > 0 ? s0.tumour[i - 1] : 0) + (i < 4 ? s0.tumour[i + 1] : 0));
    expected[i] = (stay + in) * growth_C;
    expected[5 + i] = s0.ctl[i] * growth_T;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const int reps = 100000;
  std::vector<double> sum(10, 0.0), sq(10, 0.0);
  RngStream rng(7);
  for (int r = 0; r < reps; ++r) {
    CountState s = s0;
    ibm_step(s, g, p, rng);
    for (int i = 0; i < 5; ++i) {
      const double a = static_cast<double>(s.tumour[i]), b = static_cast<double>(s.ctl[i]);
      sum[i] += a;
      sq[i] += a * a;
      sum[5 + i] += b;
      sq[5 + i] += b * b;
    }
  }
  const double elapsed = seconds_since(t0);
  double worst_z = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double m = sum[j] / reps;
    const double se = std::sqrt((sq[j] / reps - m * m) / reps);
    worst_z = std::max(worst_z, std::abs(m - expected[j]) / se);
  }
  Verdict v;
  v.require(worst_z < 3.0, fmt("max |z| = %.2f over 10 site means", worst_z));
  v.require(elapsed < 30.0, fmt("%.2f s for 1e5 replicates", elapsed));
  return v;
}

Verdict kernel_normalisation() {
  const PhenotypeGrid g(1.0, 1500);
  const double dx = g.step();
  Verdict v;
  for (double xi : {0.1, 0.3, 0.7, 1.8}) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) s += kernel_weight(g.site(i), g.site(k), xi, g);
      worst = std::max(worst, std::abs(dx * s - 1.0));
    }
    v.require(worst <= 2.0 * dx / xi, fmt("xi=%.1f max dev %.2e", xi, worst) + fmt(" (limit %.2e)", 2.0 * dx / xi));
  }
  return v;
}

Verdict discrepancy_regime() {
  const AggregateResult r = run_experiment(preset("fig6"));
  int extinct = 0;
  for (const auto& rep : r.replicates) extinct += rep.ok && rep.terminal == Terminal::tumour_extinct;
  const double pc = r.pde->rho_C.back();
  Verdict v;
  v.require(extinct >= 3, "IBM extinct " + std::to_string(extinct) + "/5 by t=100");
  v.require(r.majority_label == ScenarioLabel::eradication,
            "IBM majority " + std::string(to_string(r.majority_label.value_or(ScenarioLabel::cold))));
  v.require(pc > 1e3, fmt("PDE rho_C(100)=%.4g", pc) + " " + std::string(to_string(r.pde_classification->label)));
  return v;
}

Verdict oscillations() {
  ExperimentConfig c = preset("fig5c");
  c.engine = Engine::pde;
  const AggregateResult r = run_experiment(c);
  const auto& t = r.pde->times;
  const auto& rc = r.pde->rho_C;
  int extrema = 0, last_sign = 0;
  for (std::size_t h = 1; h < rc.size(); ++h) {
    if (t[h - 1] < 5.0 - 1e-9 || t[h] > 30.0 + 1e-9) continue;
    const double d = rc[h] - rc[h - 1];
    const int sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++extrema;
    last_sign = sign;
  }
  Verdict v;
  v.require(extrema >= 3, std::to_string(extrema) + " alternating extrema of rho_C on [5, 30]");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"eradication (fig1a)", eradication},
      {"coexistence totals (fig1b-d)", coexistence_totals},
      {"immune-score classes (fig1b-d)", immune_scores},
      {"pattern monotonicity (fig2)", pattern_monotonicity},
      {"pattern condition (fig2b)", pattern_condition},
      {"stability oracle", stability_oracle},
      {"master-equation mean", master_equation},
      {"kernel normalisation", kernel_normalisation},
      {"IBM/PDE discrepancy (fig6)", discrepancy_regime},
      {"oscillations (fig5c)", oscillations},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("criterion %2zu %s  %s [%.1fs]: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                seconds_since(t0), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
