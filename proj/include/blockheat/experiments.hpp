#pragma once

#include "blockheat/mesh.hpp"
#include "blockheat/metrics.hpp"
#include "blockheat/solvers.hpp"
#include "blockheat/system.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace blockheat {

/// 10x10 lattice, C = 10^U(-3,2), U_x = U_y = 10^U(-1,3), uniform(0,100) start, t in [0, 1].
ScenarioSpec scenario_example1(std::uint64_t seed);

/// 400x10 anisotropic lattice, C = 10^U(-3,3), U_x = 10^U(-2,4), U_y = 10^U(-4,2),
/// 100 K pulse on blocks 400..780 (1-based), t in [0, 100].
ScenarioSpec scenario_example2(std::uint64_t seed);

/// h_k = span / 2^k for k = 1..count.
std::vector<double> halving_step_sizes(double span, std::size_t count);

/// CNe run per step size, each scored against the spectral oracle at t_fin.
ConvergenceReport run_convergence_sweep(const ScenarioSpec& scenario, std::span<const double> h_list,
                                        unsigned threads = 1);

struct RunRecord {
  SolverConfig config;
  RunResult result;
  ErrorReport errors;
};

struct ExperimentResult {
  ScenarioSpec scenario;
  SpectralReport spectral;
  std::vector<RunRecord> runs;
  std::optional<ConvergenceReport> convergence;
  /// Final fields for the space-profile snapshot: initial, exact reference.
  TemperatureField initial;
  TemperatureField reference;
};

inline constexpr int kTimingRepetitions = 5;

/// CNe at h = span/100 against Dormand-Prince at rtol = atol = 1e-7. Wall
/// times are the median of `repetitions` runs.
ExperimentResult run_speed_comparison(const ScenarioSpec& scenario,
                                      int repetitions = kTimingRepetitions, unsigned threads = 1);

struct EulerProbe {
  bool diverged = false;
  std::size_t steps = 0;  // steps completed before divergence (or the budget)
  double peak = 0.0;      // max |T| seen
};

/// Runs up to max_steps explicit Euler steps of size h and reports whether the
/// divergence criterion fired.
EulerProbe probe_euler_stability(const Mesh& mesh, const TemperatureField& initial, double h,
                                 std::size_t max_steps);

/// Median of log10(stiffness ratio) over the given scenarios.
double median_log10_stiffness(std::span<const ScenarioSpec> scenarios);

}  // namespace blockheat
