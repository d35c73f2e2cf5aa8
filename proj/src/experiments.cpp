#include "blockheat/experiments.hpp"

#include "blockheat/error.hpp"

#include <algorithm>
#include <cmath>

namespace blockheat {
namespace {

template <typename Run>
RunResult timed_median(int repetitions, Run&& run) {
  std::vector<double> times;
  RunResult last;
  for (int r = 0; r < std::max(1, repetitions); ++r) {
    last = run();
    times.push_back(last.wall_time);
  }
  std::sort(times.begin(), times.end());
  last.wall_time = times[times.size() / 2];
  return last;
}

}  // namespace

ScenarioSpec scenario_example1(std::uint64_t seed) {
  ScenarioSpec s;
  s.nx = 10;
  s.ny = 10;
  s.capacity_exponents = {-3.0, 2.0};
  s.ux_exponents = {-1.0, 3.0};
  s.uy_exponents = {-1.0, 3.0};
  s.seed = seed;
  s.initial_condition = UniformRandomInit{0.0, 100.0};
  s.t0 = 0.0;
  s.t_fin = 1.0;
  return s;
}

ScenarioSpec scenario_example2(std::uint64_t seed) {
  ScenarioSpec s;
  s.nx = 400;
  s.ny = 10;
  s.capacity_exponents = {-3.0, 3.0};
  s.ux_exponents = {-2.0, 4.0};
  s.uy_exponents = {-4.0, 2.0};
  s.seed = seed;
  s.initial_condition = RectangularPulse{400, 780, 100.0, 0.0};
  s.t0 = 0.0;
  s.t_fin = 100.0;
  return s;
}

std::vector<double> halving_step_sizes(double span, std::size_t count) {
  std::vector<double> h;
  for (std::size_t k = 1; k <= count; ++k) h.push_back(std::ldexp(span, -static_cast<int>(k)));
  return h;
}

ConvergenceReport run_convergence_sweep(const ScenarioSpec& scenario, std::span<const double> h_list,
                                        unsigned threads) {
  if (h_list.size() < 3)
    throw Error(ErrorCode::invalid_argument, "convergence sweep needs at least 3 step sizes");
  for (std::size_t k = 1; k < h_list.size(); ++k)
    if (!(h_list[k] < h_list[k - 1]))
      throw Error(ErrorCode::invalid_argument, "step sizes must be strictly decreasing");

  const Mesh mesh = build_grid(scenario);
  const TemperatureField initial = initial_field(mesh, scenario);
  const TemperatureField reference = ExactPropagator(mesh).evolve(initial, scenario.t_fin);

  ConvergenceReport report;
  for (double h : h_list) {
    SolverConfig config;
    config.method = Method::cne;
    config.h = h;
    config.t0 = scenario.t0;
    config.t_fin = scenario.t_fin;
    config.threads = threads;
    const RunResult run = integrate(mesh, initial, config);
    const ErrorReport e = error_report(mesh, initial, run.final, reference);
    report.h_values.push_back(h);
    report.max_d.push_back(e.max_d);
    report.sum_d.push_back(e.sum_d);
    report.ebe.push_back(e.ebe);
  }
  fit_slopes(report);
  return report;
}

ExperimentResult run_speed_comparison(const ScenarioSpec& scenario, int repetitions,
                                      unsigned threads) {
  ExperimentResult out;
  out.scenario = scenario;
  const Mesh mesh = build_grid(scenario);
  out.initial = initial_field(mesh, scenario);
  out.spectral = spectral_report(mesh);
  out.reference = ExactPropagator(mesh).evolve(out.initial, scenario.t_fin);

  SolverConfig cne;
  cne.method = Method::cne;
  cne.h = (scenario.t_fin - scenario.t0) / 100.0;
  cne.t0 = scenario.t0;
  cne.t_fin = scenario.t_fin;
  cne.threads = threads;

  SolverConfig dopri = cne;
  dopri.method = Method::dormand_prince;
  dopri.rtol = 1e-7;
  dopri.atol = 1e-7;

  for (const auto& config : {cne, dopri}) {
    RunResult run = timed_median(repetitions, [&] { return integrate(mesh, out.initial, config); });
    const ErrorReport e = error_report(mesh, out.initial, run.final, out.reference);
    out.runs.push_back(RunRecord{config, std::move(run), e});
  }
  return out;
}

EulerProbe probe_euler_stability(const Mesh& mesh, const TemperatureField& initial, double h,
                                 std::size_t max_steps) {
  mesh.require_no_isolated();
  initial.validate_for(mesh);
  EulerProbe probe;
  double initial_peak = 0.0;
  for (double v : initial.values) initial_peak = std::max(initial_peak, std::abs(v));
  const double limit = kDivergenceFactor * (initial_peak + 1.0);
  TemperatureField current = initial;
  probe.peak = initial_peak;
  for (std::size_t step = 0; step < max_steps; ++step) {
    current = euler_step(mesh, current, h);
    double peak = 0.0;
    for (double v : current.values) peak = std::max(peak, std::abs(v));
    if (!std::isfinite(peak)) peak = INFINITY;
    probe.peak = std::max(probe.peak, peak);
    if (!(peak <= limit)) {
      probe.diverged = true;
      probe.steps = step + 1;
      return probe;
    }
  }
  probe.steps = max_steps;
  return probe;
}

double median_log10_stiffness(std::span<const ScenarioSpec> scenarios) {
  if (scenarios.empty()) throw Error(ErrorCode::invalid_argument, "no scenarios given");
  std::vector<double> logs;
  for (const auto& s : scenarios) logs.push_back(std::log10(spectral_report(build_grid(s)).stiffness_ratio));
  std::sort(logs.begin(), logs.end());
  const std::size_t m = logs.size() / 2;
  return logs.size() % 2 ? logs[m] : 0.5 * (logs[m - 1] + logs[m]);
}

}  // namespace blockheat
