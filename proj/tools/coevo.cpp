#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "coevo/errors.hpp"
#include "coevo/harness/config.hpp"
#include "coevo/harness/experiment.hpp"
#include "coevo/harness/export.hpp"
#include "coevo/harness/presets.hpp"

namespace {

using namespace coevo;
using namespace coevo::harness;

struct Source {
  std::string config_path;
  std::string preset_name;
};

void add_source(CLI::App* app, Source& src) {
  auto* cfg = app->add_option("--config", src.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  auto* pre = app->add_option("--preset", src.preset_name, "named scenario");
  cfg->excludes(pre);
  pre->excludes(cfg);
}

ExperimentConfig resolve(const Source& src) {
  if (!src.config_path.empty()) return load_config(src.config_path);
  if (!src.preset_name.empty()) return preset(src.preset_name);
  throw ConfigError("one of --config or --preset is required");
}

void print_analysis(const AnalysisReport& r) {
  using harness::detail::format_double;
  std::cout << "beta_C           " << format_double(r.beta_C) << '\n'
            << "gamma_threshold  " << format_double(r.steady.gamma_threshold) << '\n'
            << "semitrivial      (" << format_double(r.steady.semitrivial.rho_C) << ", "
            << format_double(r.steady.semitrivial.rho_T) << ") " << (r.semitrivial.stable ? "stable" : "unstable")
            << '\n';
  if (r.steady.nontrivial) {
    std::cout << "nontrivial       (" << format_double(r.steady.nontrivial->rho_C) << ", "
              << format_double(r.steady.nontrivial->rho_T) << ") "
              << (r.nontrivial->stable ? "stable" : "unstable") << '\n';
  } else {
    std::cout << "nontrivial       none\n";
  }
  if (r.pattern) {
    std::cout << "pattern bound    ";
    if (r.pattern->bound) {
      std::cout << format_double(*r.pattern->bound) << " (mode " << *r.pattern->argmin_mode << ")";
    } else {
      std::cout << "n/a";
    }
    std::cout << ", condition " << (r.pattern->verdict ? "met" : "not met") << '\n';
  }
}

void print_summary(const AggregateResult& r) {
  using harness::detail::format_double;
  if (r.ibm_ran()) {
    std::cout << "ibm replicates   " << r.replicates.size() - r.failed_replicates() << "/" << r.replicates.size()
              << " ok\n";
    for (const auto& rep : r.replicates) {
      std::cout << "  seed " << rep.seed << ": ";
      if (rep.ok) {
        std::cout << to_string(rep.classification.label) << ", I_bar " << format_double(rep.classification.I_bar)
                  << ", " << to_string(rep.terminal) << '\n';
      } else {
        std::cout << "failed: " << rep.error << '\n';
      }
    }
    if (!r.rho_C.mean.empty()) {
      std::cout << "ibm final        rho_C " << format_double(r.rho_C.mean.back()) << ", rho_T "
                << format_double(r.rho_T.mean.back()) << '\n';
    }
  }
  if (r.pde) {
    std::cout << "pde final        rho_C " << format_double(r.pde->rho_C.back()) << ", rho_T "
              << format_double(r.pde->rho_T.back()) << ", " << to_string(r.pde_classification->label)
              << ", I_bar " << format_double(r.pde_classification->I_bar) << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Tumour-immune coevolution simulator"};
  app.require_subcommand(1);

  Source sim_src;
  std::optional<std::string> engine;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::string> sim_out;
  auto* sim = app.add_subcommand("simulate", "run IBM and/or PDE and export CSV files");
  add_source(sim, sim_src);
  sim->add_option("--engine", engine, "ibm, pde or both");
  sim->add_option("--replicates", replicates, "number of IBM replicates")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "base seed");
  sim->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_out, "output directory");

  Source an_src;
  std::optional<std::string> an_out;
  auto* an = app.add_subcommand("analyze", "steady states, stability, dispersion and pattern condition");
  add_source(an, an_src);
  an->add_option("--out", an_out, "output directory");

  Source sw_src;
  std::string sw_param;
  double sw_from = 0.0, sw_to = 0.0;
  int sw_steps = 2;
  bool sw_simulate = false;
  std::optional<std::string> sw_out;
  auto* sw = app.add_subcommand("sweep", "repeat analyze (or simulate) along one parameter");
  add_source(sw, sw_src);
  sw->add_option("--param", sw_param, "config key to vary")->required();
  sw->add_option("--from", sw_from, "first value")->required();
  sw->add_option("--to", sw_to, "last value")->required();
  sw->add_option("--steps", sw_steps, "number of points")->check(CLI::Range(1, 100000));
  sw->add_flag("--simulate", sw_simulate, "also run the engines at each point");
  sw->add_option("--engine", engine, "ibm, pde or both (with --simulate)");
  sw->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  sw->add_option("--out", sw_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (sim->parsed()) {
    ExperimentConfig c = resolve(sim_src);
    if (engine) c.engine = parse_engine(*engine);
    if (replicates) c.replicates = *replicates;
    if (seed) c.seed = *seed;
    if (sim_out) c.output_dir = *sim_out;
    c.validate();
    const AggregateResult r = run_experiment(c, workers);
    export_result(r, c.output_dir);
    print_summary(r);
    std::cout << "wrote " << c.output_dir << '\n';
    if (r.ibm_ran() && r.failed_replicates() == r.replicates.size()) {
      throw NumericError("all replicates failed: " + r.replicates.front().error);
    }
    return 0;
  }

  if (an->parsed()) {
    ExperimentConfig c = resolve(an_src);
    if (an_out) c.output_dir = *an_out;
    const AnalysisReport r = analyze(c);
    print_analysis(r);
    write_analysis(r, c.output_dir);
    std::cout << "wrote " << c.output_dir << '\n';
    return 0;
  }

  ExperimentConfig base = resolve(sw_src);
  if (engine) base.engine = parse_engine(*engine);
  const std::filesystem::path dir = sw_out ? *sw_out : base.output_dir + "/sweep_" + sw_param;
  harness::detail::ensure_dir(dir);
  std::ofstream table(dir / "sweep.csv");
  if (!table) throw ConfigError("cannot write " + (dir / "sweep.csv").string());
  table << "index," << sw_param
        << ",gamma_threshold,nontrivial_exists,semitrivial_stable,nontrivial_stable,pattern_bound";
  if (sw_simulate) table << ",ibm_rho_C,ibm_rho_T,ibm_label,pde_rho_C,pde_rho_T,pde_label";
  table << '\n';
  for (int i = 0; i < sw_steps; ++i) {
    const double v = sw_steps == 1 ? sw_from : sw_from + (sw_to - sw_from) * i / (sw_steps - 1);
    ExperimentConfig c = base;
    set_value(c, sw_param, harness::detail::format_double(v));
    c.output_dir = (dir / ("point_" + std::to_string(i))).string();
    c.validate();
    const AnalysisReport a = analyze(c);
    const auto num = [](double x) { return harness::detail::format_double(x); };
    table << i << ',' << num(v) << ',' << num(a.steady.gamma_threshold) << ',' << (a.steady.nontrivial ? 1 : 0)
          << ',' << (a.semitrivial.stable ? 1 : 0) << ',' << (a.nontrivial && a.nontrivial->stable ? 1 : 0) << ',';
    if (a.pattern && a.pattern->bound) table << num(*a.pattern->bound);
    if (sw_simulate) {
      const AggregateResult r = run_experiment(c, workers);
      export_result(r, c.output_dir);
      table << ',';
      if (!r.rho_C.mean.empty()) table << num(r.rho_C.mean.back()) << ',' << num(r.rho_T.mean.back());
      else table << ',';
      table << ',' << (r.majority_label ? std::string(to_string(*r.majority_label)) : "");
      if (r.pde) {
        table << ',' << num(r.pde->rho_C.back()) << ',' << num(r.pde->rho_T.back()) << ','
              << to_string(r.pde_classification->label);
      } else {
        table << ",,,";
      }
    }
    table << '\n';
    std::cout << sw_param << " = " << num(v) << " done\n";
  }
  std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const coevo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const coevo::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const coevo::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
