#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coevo/analysis.hpp"
#include "coevo/errors.hpp"
#include "coevo/params.hpp"

namespace coevo::harness {

enum class Engine { ibm, pde, both };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::ibm: return "ibm";
    case Engine::pde: return "pde";
    case Engine::both: return "both";
  }
  return "both";
}

inline Engine parse_engine(std::string_view s) {
  if (s == "ibm") return Engine::ibm;
  if (s == "pde") return Engine::pde;
  if (s == "both") return Engine::both;
  throw ConfigError("engine must be ibm, pde or both (got '" + std::string(s) + "')");
}

struct ExperimentConfig {
  ModelParams params;
  double half_width = 1.0;
  std::size_t n_sites = 1500;
  InitialCondition init;
  Engine engine = Engine::both;
  int replicates = 5;
  std::uint64_t seed = 1;
  std::vector<double> snapshot_times{0.4, 4.0, 10.0, 16.0, 30.0};
  std::string output_dir = "out";
  double hot_threshold = 10.0;
  int max_mode = 100;
  PeakOptions peaks;

  void validate() const {
    if (!(half_width > 0.0)) throw ConfigError("L must be positive");
    if (n_sites < 3) throw ConfigError("n_sites must be at least 3");
    params.validate(2.0 * half_width);
    init.validate();
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    if (!(hot_threshold > 1.0)) throw ConfigError("hot_threshold must exceed 1");
    if (max_mode < 1) throw ConfigError("max_mode must be >= 1");
    if (!(peaks.width_fraction >= 0.0)) throw ConfigError("peak_width_fraction must be >= 0");
    if (!(peaks.relative_height >= 0.0 && peaks.relative_height <= 1.0)) {
      throw ConfigError("peak_relative_height must lie in [0, 1]");
    }
    for (double t : snapshot_times) {
      if (!(t >= 0.0)) throw ConfigError("snapshot times must be >= 0");
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("value for " + std::string(key) + " is not a number: '" + std::string(text) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
  Int v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("value for " + std::string(key) + " is not an integer: '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (!item.empty()) out.push_back(parse_double(key, item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

inline const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto real = [&t](const char* key, double ModelParams::*field) {
      t[key] = [key, field](ExperimentConfig& c, std::string_view v) { c.params.*field = parse_double(key, v); };
    };
    real("alpha_C", &ModelParams::alpha_C);
    real("alpha_T", &ModelParams::alpha_T);
    real("mu_C", &ModelParams::mu_C);
    real("mu_T", &ModelParams::mu_T);
    real("zeta_C", &ModelParams::zeta_C);
    real("zeta_T", &ModelParams::zeta_T);
    real("gamma", &ModelParams::gamma);
    real("eta", &ModelParams::eta);
    real("theta_C", &ModelParams::theta_C);
    real("theta_T", &ModelParams::theta_T);
    real("lambda_C", &ModelParams::lambda_C);
    real("tau", &ModelParams::tau);
    real("t_final", &ModelParams::t_final);
    t["L"] = [](ExperimentConfig& c, std::string_view v) { c.half_width = parse_double("L", v); };
    t["n_sites"] = [](ExperimentConfig& c, std::string_view v) { c.n_sites = parse_int<std::size_t>("n_sites", v); };
    t["init_a"] = [](ExperimentConfig& c, std::string_view v) { c.init.amplitude = parse_double("init_a", v); };
    t["init_A"] = [](ExperimentConfig& c, std::string_view v) { c.init.wavenumber = parse_double("init_A", v); };
    t["engine"] = [](ExperimentConfig& c, std::string_view v) { c.engine = parse_engine(v); };
    t["replicates"] = [](ExperimentConfig& c, std::string_view v) { c.replicates = parse_int<int>("replicates", v); };
    t["seed"] = [](ExperimentConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("seed", v); };
    t["snapshot_times"] = [](ExperimentConfig& c, std::string_view v) {
      c.snapshot_times = parse_list("snapshot_times", v);
    };
    t["output_dir"] = [](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(v); };
    t["hot_threshold"] = [](ExperimentConfig& c, std::string_view v) {
      c.hot_threshold = parse_double("hot_threshold", v);
    };
    t["max_mode"] = [](ExperimentConfig& c, std::string_view v) { c.max_mode = parse_int<int>("max_mode", v); };
    t["peak_width_fraction"] = [](ExperimentConfig& c, std::string_view v) {
      c.peaks.width_fraction = parse_double("peak_width_fraction", v);
    };
    t["peak_relative_height"] = [](ExperimentConfig& c, std::string_view v) {
      c.peaks.relative_height = parse_double("peak_relative_height", v);
    };
    return t;
  }();
  return table;
}

}  // namespace detail

/// Applies one key=value pair. Throws ConfigError on unknown keys or bad values.
inline void set_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
  it->second(config, value);
}

/// Parses the flat key=value format. '#' starts a comment; blank lines are
/// ignored. Omitted keys keep the reference defaults; the result is validated.
inline ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = detail::trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    set_value(base, detail::trim(std::string_view(content).substr(0, eq)),
              detail::trim(std::string_view(content).substr(eq + 1)));
  }
  base.validate();
  return base;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// Full echo of the effective configuration in the same key=value format.
/// Doubles are written in shortest round-trip form, so parse_config(serialize(c))
/// reproduces c exactly.
inline std::string serialize(const ExperimentConfig& c) {
  using detail::format_double;
  std::ostringstream out;
  const ModelParams& p = c.params;
  out << "alpha_C = " << format_double(p.alpha_C) << "\n"
      << "alpha_T = " << format_double(p.alpha_T) << "\n"
      << "mu_C = " << format_double(p.mu_C) << "\n"
      << "mu_T = " << format_double(p.mu_T) << "\n"
      << "zeta_C = " << format_double(p.zeta_C) << "\n"
      << "zeta_T = " << format_double(p.zeta_T) << "\n"
      << "gamma = " << format_double(p.gamma) << "\n"
      << "eta = " << format_double(p.eta) << "\n"
      << "theta_C = " << format_double(p.theta_C) << "\n"
      << "theta_T = " << format_double(p.theta_T) << "\n"
      << "lambda_C = " << format_double(p.lambda_C) << "\n"
      << "tau = " << format_double(p.tau) << "\n"
      << "t_final = " << format_double(p.t_final) << "\n"
      << "L = " << format_double(c.half_width) << "\n"
      << "n_sites = " << c.n_sites << "\n"
      << "init_a = " << format_double(c.init.amplitude) << "\n"
      << "init_A = " << format_double(c.init.wavenumber) << "\n"
      << "engine = " << to_string(c.engine) << "\n"
      << "replicates = " << c.replicates << "\n"
      << "seed = " << c.seed << "\n"
      << "snapshot_times = ";
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
    out << (i ? ", " : "") << format_double(c.snapshot_times[i]);
  }
  out << "\n"
      << "output_dir = " << c.output_dir << "\n"
      << "hot_threshold = " << format_double(c.hot_threshold) << "\n"
      << "max_mode = " << c.max_mode << "\n"
      << "peak_width_fraction = " << format_double(c.peaks.width_fraction) << "\n"
      << "peak_relative_height = " << format_double(c.peaks.relative_height) << "\n";
  return out.str();
}

}  // namespace coevo::harness
