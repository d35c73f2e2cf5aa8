#include "blockheat/metrics.hpp"

#include "blockheat/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blockheat {
namespace {

void check_comparable(const TemperatureField& a, const TemperatureField& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::size_mismatch, "fields have different lengths");
  const double scale = std::max({1.0, std::abs(a.time), std::abs(b.time)});
  if (std::abs(a.time - b.time) > 1e-12 * scale)
    throw Error(ErrorCode::time_mismatch, "fields are stamped at different times");
}

void check_mesh(const Mesh& mesh, const TemperatureField& field) {
  if (field.size() != mesh.size())
    throw Error(ErrorCode::size_mismatch, "field length does not match mesh");
}

std::vector<OrderSample> tail_samples(const std::vector<double>& h,
                                      const std::vector<double>& errors, std::size_t tail,
                                      bool absolute) {
  std::vector<OrderSample> samples;
  for (std::size_t k = h.size() - tail; k < h.size(); ++k)
    samples.push_back({h[k], absolute ? std::abs(errors[k]) : errors[k]});
  return samples;
}

}  // namespace

double max_deviation(const TemperatureField& a, const TemperatureField& b) {
  check_comparable(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double sum_deviation(const TemperatureField& a, const TemperatureField& b) {
  check_comparable(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s;
}

double total_energy(const Mesh& mesh, const TemperatureField& field) {
  check_mesh(mesh, field);
  double e = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) e += mesh.capacity(i) * field.values[i];
  return e;
}

double energy_balance_error(const Mesh& mesh, const TemperatureField& initial,
                            const TemperatureField& final) {
  check_mesh(mesh, initial);
  check_mesh(mesh, final);
  // Summing per-block differences keeps the cancellation local.
  double e = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    e += mesh.capacity(i) * (final.values[i] - initial.values[i]);
  return e;
}

ErrorReport error_report(const Mesh& mesh, const TemperatureField& initial,
                         const TemperatureField& numerical, const TemperatureField& reference) {
  return ErrorReport{max_deviation(numerical, reference), sum_deviation(numerical, reference),
                     energy_balance_error(mesh, initial, numerical)};
}

double estimate_order(std::span<const OrderSample> samples) {
  if (samples.size() < 3)
    throw Error(ErrorCode::invalid_argument, "order estimation needs at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& s : samples) {
    if (!(s.h > 0.0)) throw Error(ErrorCode::invalid_argument, "step sizes must be positive");
    if (!(s.error > 0.0))
      throw Error(ErrorCode::degenerate,
                  "zero error at h = " + std::to_string(s.h) + "; method is exact there");
    sx += std::log10(s.h);
    sy += std::log10(s.error);
  }
  const double n = static_cast<double>(samples.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    const double dx = std::log10(s.h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log10(s.error) - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::degenerate, "all step sizes are equal");
  return sxy / sxx;
}

double ConvergenceReport::halving_ratio() const { return std::pow(2.0, slope_max_d); }

void fit_slopes(ConvergenceReport& report, std::size_t tail) {
  const std::size_t n = report.h_values.size();
  if (n < 3 || report.max_d.size() != n || report.sum_d.size() != n || report.ebe.size() != n)
    throw Error(ErrorCode::invalid_argument, "convergence report needs >= 3 aligned points");
  report.fit_points = std::clamp<std::size_t>(tail, 3, n);
  const std::size_t p = report.fit_points;
  auto fit = [&](const std::vector<double>& errors, bool absolute) {
    const auto samples = tail_samples(report.h_values, errors, p, absolute);
    return estimate_order(samples);
  };
  report.slope_max_d = fit(report.max_d, false);
  report.slope_sum_d = fit(report.sum_d, false);
  report.slope_abs_ebe = fit(report.ebe, true);
}

}  // namespace blockheat
