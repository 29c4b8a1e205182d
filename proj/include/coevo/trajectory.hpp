#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace coevo {

enum class Terminal { completed, tumour_extinct, ctl_extinct };

inline std::string_view to_string(Terminal t) {
  switch (t) {
    case Terminal::tumour_extinct: return "tumour_extinct";
    case Terminal::ctl_extinct: return "ctl_extinct";
    case Terminal::completed: break;
  }
  return "completed";
}

template <class Value>
struct Snapshot {
  double t = 0.0;
  std::vector<Value> tumour;
  std::vector<Value> ctl;
};

/// Time series shared by both engines. Index 0 is the initial state; entry h
/// is the state after h steps.
template <class Value>
struct Trajectory {
  double tau = 0.0;
  std::vector<double> times;
  std::vector<double> rho_C;
  std::vector<double> rho_T;
  /// rho_T / rho_C, +inf once the tumour population is extinct.
  std::vector<double> immune_score;
  std::vector<Snapshot<Value>> snapshots;
  Terminal terminal = Terminal::completed;
  std::optional<double> extinction_time;

  void record(double t, double rc, double rt) {
    times.push_back(t);
    rho_C.push_back(rc);
    rho_T.push_back(rt);
    immune_score.push_back(rc > 0.0 ? rt / rc : std::numeric_limits<double>::infinity());
  }
};

struct IbmTrajectory : Trajectory<std::int64_t> {};

struct PdeTrajectory : Trajectory<double> {
  double beta_C = 0.0;
  double cfl = 0.0;  ///< beta_C * dt / dx^2
  double min_density = std::numeric_limits<double>::infinity();
};

struct SnapshotPoint {
  long long step = 0;
  double t = 0.0;
};

/// Snapshot requests mapped to step round(t / tau); requests outside [0, steps] are dropped.
inline std::vector<SnapshotPoint> snapshot_points(const std::vector<double>& times, double tau,
                                                  long long steps) {
  std::vector<SnapshotPoint> out;
  for (double t : times) {
    const long long h = std::llround(t / tau);
    if (h >= 0 && h <= steps) out.push_back({h, t});
  }
  return out;
}

}  // namespace coevo
