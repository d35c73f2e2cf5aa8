#pragma once

#include "blockheat/mesh.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace blockheat {

struct ErrorReport {
  double max_d = 0.0;  // K
  double sum_d = 0.0;  // K, sum of absolute deviations
  double ebe = 0.0;    // J, signed
};

/// max_i |a_i - b_i|. Throws size_mismatch / time_mismatch.
double max_deviation(const TemperatureField& a, const TemperatureField& b);
/// sum_i |a_i - b_i|.
double sum_deviation(const TemperatureField& a, const TemperatureField& b);

/// sum_i C_i T_i
double total_energy(const Mesh& mesh, const TemperatureField& field);

/// total_energy(final) - total_energy(initial); zero for an exact run.
double energy_balance_error(const Mesh& mesh, const TemperatureField& initial,
                            const TemperatureField& final);

ErrorReport error_report(const Mesh& mesh, const TemperatureField& initial,
                         const TemperatureField& numerical, const TemperatureField& reference);

struct OrderSample {
  double h = 0.0;
  double error = 0.0;
};

/// Least-squares slope of log10(error) against log10(h). Needs >= 3 points;
/// throws degenerate on a non-positive error.
double estimate_order(std::span<const OrderSample> samples);

/// Errors per step size, h strictly decreasing. Slopes are fitted on the
/// `fit_points` smallest step sizes.
struct ConvergenceReport {
  std::vector<double> h_values;
  std::vector<double> max_d;
  std::vector<double> sum_d;
  std::vector<double> ebe;  // signed
  std::size_t fit_points = 0;
  double slope_max_d = 0.0;
  double slope_sum_d = 0.0;
  double slope_abs_ebe = 0.0;

  /// Error reduction per halving of h implied by the MaxD slope.
  double halving_ratio() const;
};

/// Default asymptotic window for order fits.
inline constexpr std::size_t kOrderFitTail = 5;

/// Fills fit_points and the three slopes from the tail of the sweep.
void fit_slopes(ConvergenceReport& report, std::size_t tail = kOrderFitTail);

}  // namespace blockheat
