#pragma once

#include "blockheat/mesh.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace blockheat {

enum class Method { cne, euler, dormand_prince, exact };

std::string_view to_string(Method method) noexcept;
/// Accepts "cne", "euler", "dormand_prince" (or "dopri"), "exact". Throws invalid_argument.
Method parse_method(std::string_view name);

struct SolverConfig {
  Method method = Method::cne;
  double h = 0.01;  // fixed-step methods
  double t0 = 0.0;
  double t_fin = 1.0;
  double rtol = 1e-7;  // adaptive only
  double atol = 1e-7;
  bool record_trajectory = false;
  /// Worker threads for the fixed-step maps; 0 means all available cores.
  unsigned threads = 1;

  void validate() const;
};

struct RunResult {
  TemperatureField final;
  std::size_t steps_taken = 0;
  std::size_t steps_rejected = 0;
  double wall_time = 0.0;  // s, monotonic clock
  std::vector<TemperatureField> trajectory;  // includes the initial field when recorded
};

/// Coefficients of one exponential update: T_i' = self * T_i + sum_k neighbor[k] * T_{j_k},
/// with neighbours in mesh.neighbors(i) order.
struct CneWeights {
  double self = 0.0;
  std::vector<double> neighbor;
};

CneWeights cne_weights(const Mesh& mesh, BlockId i, double h);

/// Exponential relaxation of every block toward its conductance-weighted
/// neighbour average, reading only the old field.
TemperatureField cne_step(const Mesh& mesh, const TemperatureField& field, double h,
                          unsigned threads = 1);

/// Forward Euler (FTCS on a lattice).
TemperatureField euler_step(const Mesh& mesh, const TemperatureField& field, double h,
                            unsigned threads = 1);

/// Euler runs abort with divergence once max|T| exceeds this factor times (max|T0| + 1).
inline constexpr double kDivergenceFactor = 1e6;

/// Dispatches on config.method. Fixed-step methods shorten the last step to
/// land on t_fin.
RunResult integrate(const Mesh& mesh, const TemperatureField& initial, const SolverConfig& config);

/// Dormand-Prince 5(4) with FSAL and a PI step-size controller.
RunResult dormand_prince_integrate(const Mesh& mesh, const TemperatureField& initial,
                                   double t_fin, double rtol, double atol,
                                   bool record_trajectory = false);

/// Reusable spectral propagator T(t) = C^{-1/2} V exp(Lambda (t - t0)) V^T C^{1/2} T(t0).
class ExactPropagator {
 public:
  explicit ExactPropagator(const Mesh& mesh);

  TemperatureField evolve(const TemperatureField& initial, double t) const;
  std::size_t size() const noexcept { return eigenvalues_.size(); }

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> vectors_;  // column-major
  std::vector<double> sqrt_capacity_;
};

TemperatureField exact_solution(const Mesh& mesh, const TemperatureField& initial, double t);

}  // namespace blockheat
