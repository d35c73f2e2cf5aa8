#include "blockheat/solvers.hpp"

#include "blockheat/error.hpp"
#include "blockheat/system.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>

namespace blockheat {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_positive_step(double h) {
  if (!std::isfinite(h) || !(h > 0.0))
    throw Error(ErrorCode::invalid_argument, "step size h must be positive and finite");
}

/// Per-block decay e^{-h/tau_i} and gain (1 - e^{-h/tau_i}) / sum_j U_ij for a fixed h.
struct CneCoefficients {
  std::vector<double> decay;
  std::vector<double> gain;

  CneCoefficients(const Mesh& mesh, double h) : decay(mesh.size()), gain(mesh.size()) {
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const double total = mesh.total_conductance(i);
      const double x = h * total / mesh.capacity(i);
      // exp(-x) flushes to zero past x ~ 745; the update then reduces to the neighbour average.
      decay[i] = std::exp(-x);
      gain[i] = -std::expm1(-x) / total;
    }
  }
};

void cne_kernel(const Mesh& mesh, const CneCoefficients& coeff, std::span<const double> old_t,
                std::span<double> new_t, unsigned threads) {
  const auto offsets = mesh.row_offsets();
  const auto adj = mesh.adjacency();
  detail::parallel_for(mesh.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double weighted = 0.0;
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
        weighted += adj[k].conductance * old_t[adj[k].id.index];
      new_t[i] = old_t[i] * coeff.decay[i] + weighted * coeff.gain[i];
    }
  });
}

void euler_kernel(const Mesh& mesh, double h, std::span<const double> old_t,
                  std::span<double> new_t, unsigned threads) {
  const auto offsets = mesh.row_offsets();
  const auto adj = mesh.adjacency();
  const auto caps = mesh.capacities();
  detail::parallel_for(mesh.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double ti = old_t[i];
      double flux = 0.0;
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
        flux += adj[k].conductance * (old_t[adj[k].id.index] - ti);
      new_t[i] = ti + h * (flux / caps[i]);
    }
  });
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Number of fixed steps so that the last one (possibly shortened) lands on t_fin.
std::size_t fixed_step_count(double span, double h) {
  const double ratio = span / h;
  if (ratio <= 1.0) return 1;
  // Tolerate ratios a few ulps above an integer, e.g. 1 / 0.01.
  const double steps = std::ceil(ratio * (1.0 - 1e-12));
  if (steps > 1e12) throw Error(ErrorCode::invalid_argument, "step size too small for the time span");
  return static_cast<std::size_t>(steps);
}

RunResult fixed_step_run(const Mesh& mesh, const TemperatureField& initial, const SolverConfig& config) {
  const auto start = Clock::now();
  const double span = config.t_fin - config.t0;
  const std::size_t n_steps = fixed_step_count(span, config.h);
  const double last_h = span - static_cast<double>(n_steps - 1) * config.h;

  RunResult result;
  std::vector<double> current = initial.values;
  std::vector<double> next(current.size());
  if (config.record_trajectory) result.trajectory.push_back(TemperatureField{current, config.t0});

  const double divergence_limit = kDivergenceFactor * (max_abs(current) + 1.0);
  std::optional<CneCoefficients> full, tail;
  if (config.method == Method::cne) {
    full.emplace(mesh, config.h);
    if (last_h != config.h) tail.emplace(mesh, last_h);
  }

  for (std::size_t step = 0; step < n_steps; ++step) {
    const bool last = step + 1 == n_steps;
    const double h = last ? last_h : config.h;
    if (config.method == Method::cne) {
      cne_kernel(mesh, (last && tail) ? *tail : *full, current, next, config.threads);
    } else {
      euler_kernel(mesh, h, current, next, config.threads);
      const double peak = max_abs(next);
      if (!(peak <= divergence_limit))
        throw Error(ErrorCode::divergence,
                    "instability detected: explicit Euler diverged at step " +
                        std::to_string(step + 1) + " (max|T| = " + std::to_string(peak) + ")");
    }
    current.swap(next);
    if (config.record_trajectory) {
      const double t = last ? config.t_fin : config.t0 + static_cast<double>(step + 1) * config.h;
      result.trajectory.push_back(TemperatureField{current, t});
    }
  }
  result.final = TemperatureField{std::move(current), config.t_fin};
  result.steps_taken = n_steps;
  result.wall_time = seconds_since(start);
  return result;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Step-size controller.
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kBeta = 0.04;
constexpr double kAlpha = 0.2 - 0.75 * kBeta;
constexpr double kMinStepFraction = 1e-14;

double mixed_norm(std::span<const double> err, std::span<const double> y0,
                  std::span<const double> y1, double rtol, double atol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / scale;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

/// Starting step from the local Lipschitz estimate (Hairer, Norsett & Wanner II.4).
double initial_step(const Mesh& mesh, std::span<const double> y0, std::span<const double> f0,
                    double span, double rtol, double atol) {
  const std::size_t n = y0.size();
  std::vector<double> zeros(n, 0.0);
  const double d0 = mixed_norm(y0, y0, y0, rtol, atol);
  const double d1 = mixed_norm(f0, y0, y0, rtol, atol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  std::vector<double> y1(n), f1(n), diff(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
  rhs_into(mesh, y1, f1);
  for (std::size_t i = 0; i < n; ++i) diff[i] = f1[i] - f0[i];
  const double d2 = mixed_norm(diff, y0, y0, rtol, atol) / h0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::cne: return "cne";
    case Method::euler: return "euler";
    case Method::dormand_prince: return "dormand_prince";
    case Method::exact: return "exact";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "cne") return Method::cne;
  if (name == "euler") return Method::euler;
  if (name == "dormand_prince" || name == "dopri" || name == "dp") return Method::dormand_prince;
  if (name == "exact") return Method::exact;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (!std::isfinite(t0) || !std::isfinite(t_fin) || !(t0 < t_fin))
    throw Error(ErrorCode::invalid_argument, "t0 must be < t_fin");
  if (method == Method::cne || method == Method::euler) require_positive_step(h);
  if (method == Method::dormand_prince && (!(rtol > 0.0) || !(atol > 0.0)))
    throw Error(ErrorCode::invalid_argument, "rtol and atol must be positive");
}

CneWeights cne_weights(const Mesh& mesh, BlockId i, double h) {
  require_positive_step(h);
  const double tau = characteristic_time(mesh, i);
  const double x = h / tau;
  const double complement = -std::expm1(-x);
  const double total = mesh.total_conductance(i.index);
  CneWeights w;
  w.self = std::exp(-x);
  for (const auto& nb : mesh.neighbors(i)) w.neighbor.push_back(complement * nb.conductance / total);
  return w;
}

TemperatureField cne_step(const Mesh& mesh, const TemperatureField& field, double h,
                          unsigned threads) {
  require_positive_step(h);
  mesh.require_no_isolated();
  field.validate_for(mesh);
  TemperatureField out{std::vector<double>(mesh.size()), field.time + h};
  cne_kernel(mesh, CneCoefficients(mesh, h), field.values, out.values, threads);
  return out;
}

TemperatureField euler_step(const Mesh& mesh, const TemperatureField& field, double h,
                            unsigned threads) {
  require_positive_step(h);
  mesh.require_no_isolated();
  field.validate_for(mesh);
  TemperatureField out{std::vector<double>(mesh.size()), field.time + h};
  euler_kernel(mesh, h, field.values, out.values, threads);
  return out;
}

RunResult integrate(const Mesh& mesh, const TemperatureField& initial, const SolverConfig& config) {
  config.validate();
  mesh.require_no_isolated();
  initial.validate_for(mesh);
  if (std::abs(initial.time - config.t0) > 1e-12 * std::max(1.0, std::abs(config.t0)))
    throw Error(ErrorCode::time_mismatch, "initial field time does not match t0");

  switch (config.method) {
    case Method::cne:
    case Method::euler:
      return fixed_step_run(mesh, initial, config);
    case Method::dormand_prince: {
      TemperatureField start = initial;
      start.time = config.t0;
      return dormand_prince_integrate(mesh, start, config.t_fin, config.rtol, config.atol,
                                      config.record_trajectory);
    }
    case Method::exact: {
      const auto start = Clock::now();
      RunResult result;
      TemperatureField start_field = initial;
      start_field.time = config.t0;
      if (config.record_trajectory) result.trajectory.push_back(start_field);
      result.final = exact_solution(mesh, start_field, config.t_fin);
      if (config.record_trajectory) result.trajectory.push_back(result.final);
      result.steps_taken = 1;
      result.wall_time = seconds_since(start);
      return result;
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown method");
}

RunResult dormand_prince_integrate(const Mesh& mesh, const TemperatureField& initial,
                                   double t_fin, double rtol, double atol,
                                   bool record_trajectory) {
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw Error(ErrorCode::invalid_argument, "rtol and atol must be positive");
  mesh.require_no_isolated();
  initial.validate_for(mesh);
  const double t0 = initial.time;
  if (!(t0 < t_fin)) throw Error(ErrorCode::invalid_argument, "t0 must be < t_fin");

  const auto start = Clock::now();
  const std::size_t n = mesh.size();
  const double span = t_fin - t0;
  const double min_step = kMinStepFraction * span;

  RunResult result;
  std::vector<double> y = initial.values, y_new(n), stage(n), err(n);
  std::array<std::vector<double>, 7> k;
  for (auto& v : k) v.resize(n);
  if (record_trajectory) result.trajectory.push_back(TemperatureField{y, t0});

  rhs_into(mesh, y, k[0]);
  double h = initial_step(mesh, y, k[0], span, rtol, atol);
  double t = t0;
  double err_prev = 1e-4;
  bool rejected_last = false;

  while (t < t_fin) {
    if (h < min_step)
      throw Error(ErrorCode::adaptive_failure,
                  "Dormand-Prince step size underflow at t = " + std::to_string(t));
    bool lands = false;
    if (t + h >= t_fin) {
      h = t_fin - t;
      lands = true;
    }

    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + h * (a21 * k[0][i]);
    rhs_into(mesh, stage, k[1]);
    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    rhs_into(mesh, stage, k[2]);
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    rhs_into(mesh, stage, k[3]);
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    rhs_into(mesh, stage, k[4]);
    for (std::size_t i = 0; i < n; ++i)
      stage[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                             a65 * k[4][i]);
    rhs_into(mesh, stage, k[5]);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                             a76 * k[5][i]);
    rhs_into(mesh, y_new, k[6]);
    for (std::size_t i = 0; i < n; ++i)
      err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                    e7 * k[6][i]);

    const double err_norm = mixed_norm(err, y, y_new, rtol, atol);
    if (!std::isfinite(err_norm))
      throw Error(ErrorCode::adaptive_failure, "Dormand-Prince error estimate is not finite");

    if (err_norm <= 1.0) {
      t = lands ? t_fin : t + h;
      y.swap(y_new);
      k[0].swap(k[6]);  // first-same-as-last
      ++result.steps_taken;
      if (record_trajectory) result.trajectory.push_back(TemperatureField{y, t});
      const double e = std::max(err_norm, 1e-10);
      double factor = kSafety * std::pow(e, -kAlpha) * std::pow(err_prev, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      if (rejected_last) factor = std::min(factor, 1.0);
      err_prev = e;
      rejected_last = false;
      h *= factor;
    } else {
      ++result.steps_rejected;
      const double factor = std::max(kMinFactor, kSafety * std::pow(err_norm, -kAlpha));
      h *= factor;
      rejected_last = true;
    }
  }

  result.final = TemperatureField{std::move(y), t_fin};
  result.wall_time = seconds_since(start);
  return result;
}

ExactPropagator::ExactPropagator(const Mesh& mesh) {
  auto eig = eigendecompose(mesh, true);
  eigenvalues_ = std::move(eig.values);
  vectors_ = std::move(eig.vectors);
  const std::size_t n = mesh.size();
  sqrt_capacity_.resize(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_capacity_[i] = std::sqrt(mesh.capacity(i));

  // The null space of S is spanned by sqrt(C) restricted to each connected
  // component. Use it in place of the computed zero modes, whose accuracy
  // degrades with the stiffness ratio.
  std::vector<std::size_t> label(n, n);
  std::vector<std::size_t> stack;
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    label[s] = components;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (const auto& nb : mesh.neighbors(BlockId{i}))
        if (label[nb.id.index] == n) {
          label[nb.id.index] = components;
          stack.push_back(nb.id.index);
        }
    }
    ++components;
  }
  for (std::size_t c = 0; c < components; ++c) {
    const std::size_t k = n - components + c;
    double* v = vectors_.data() + k * n;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = label[i] == c ? sqrt_capacity_[i] : 0.0;
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) v[i] /= norm;
    eigenvalues_[k] = 0.0;
  }
  for (std::size_t k = 0; k + components < n; ++k) {
    double* v = vectors_.data() + k * n;
    for (std::size_t c = 0; c < components; ++c) {
      const double* z = vectors_.data() + (n - components + c) * n;
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[i] * z[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * z[i];
    }
  }
}

TemperatureField ExactPropagator::evolve(const TemperatureField& initial, double t) const {
  const std::size_t n = size();
  if (initial.size() != n) throw Error(ErrorCode::size_mismatch, "field length does not match mesh");
  const double elapsed = t - initial.time;
  std::vector<double> y(n), coeff(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) y[i] = sqrt_capacity_[i] * initial.values[i];
  for (std::size_t k = 0; k < n; ++k) {
    const double* v = vectors_.data() + k * n;
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v[i] * y[i];
    coeff[k] = dot * std::exp(eigenvalues_[k] * elapsed);
  }
  TemperatureField out{std::vector<double>(n, 0.0), t};
  for (std::size_t k = 0; k < n; ++k) {
    const double* v = vectors_.data() + k * n;
    const double c = coeff[k];
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) out.values[i] += c * v[i];
  }
  for (std::size_t i = 0; i < n; ++i) out.values[i] /= sqrt_capacity_[i];
  return out;
}

TemperatureField exact_solution(const Mesh& mesh, const TemperatureField& initial, double t) {
  return ExactPropagator(mesh).evolve(initial, t);
}

}  // namespace blockheat
