#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/harness/config.hpp"

namespace coevo::harness {

// Named scenarios. Every preset starts from the reference parameters and
// overrides only what the scenario changes.

inline std::vector<std::string> preset_names() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig4",   "fig5a",
          "fig5b", "fig5c", "fig6",  "figS1a", "figS1b", "figS1c", "figS1d"};
}

inline ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  ModelParams& p = c.params;

  auto fig1 = [&](double gamma) {
    p.gamma = gamma;
    p.eta = 1.8;
    p.theta_C = p.theta_T = 1.8;
    c.init = {0.0, 5.0};
    c.replicates = 2;
  };
  auto fig2 = [&](double theta) {
    p.gamma = 1.5;
    p.eta = 0.7;
    p.theta_C = p.theta_T = theta;
    c.init = {1.0, 5.0};
    c.replicates = 2;
  };
  auto fig5 = [&](double eta) {
    p.gamma = 1.0;
    p.eta = eta;
    p.theta_C = p.theta_T = 0.7;
    c.init = {1.0, 5.0};
    c.replicates = 5;
  };

  if (name == "fig1a" || name == "figS1a") {
    fig1(3.5);
    p.alpha_T = 0.5;
  } else if (name == "fig1b" || name == "figS1b") {
    fig1(2.0);
  } else if (name == "fig1c" || name == "figS1c") {
    fig1(0.3);
  } else if (name == "fig1d" || name == "figS1d") {
    fig1(0.12);
  } else if (name == "fig2a") {
    fig2(0.5);
  } else if (name == "fig2b" || name == "fig4") {
    fig2(0.3);
  } else if (name == "fig2c") {
    fig2(0.2);
  } else if (name == "fig5a") {
    fig5(1.0);
  } else if (name == "fig5b") {
    fig5(0.6);
  } else if (name == "fig5c") {
    fig5(0.2);
  } else if (name == "fig6") {
    p.alpha_T = 0.5;
    p.mu_T = 2e-6;
    p.gamma = 1.1;
    p.eta = 0.1;
    p.theta_C = p.theta_T = 1.8;
    p.t_final = 100.0;
    c.init = {1.0, 5.0};
    c.replicates = 5;
    c.snapshot_times = {0.4, 4.0, 10.0, 16.0, 30.0, 100.0};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  if (name.starts_with("figS1")) c.init = {1.0, 5.0};
  c.output_dir = "out/" + std::string(name);
  c.validate();
  return c;
}

}  // namespace coevo::harness
