#pragma once

#include "blockheat/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace blockheat {

/// Zero-based block index. External files and pulse bands use 1-based indices.
struct BlockId {
  std::size_t index = 0;

  constexpr BlockId() = default;
  constexpr explicit BlockId(std::size_t i) noexcept : index(i) {}
  friend constexpr bool operator==(BlockId, BlockId) = default;
  friend constexpr auto operator<=>(BlockId, BlockId) = default;
};

/// Undirected conductance link. Stored with a < b.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double conductance = 0.0;  // W/K
};

struct Neighbor {
  BlockId id;
  double conductance = 0.0;
};

struct GridShape {
  std::size_t nx = 0;
  std::size_t ny = 0;
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Column-major lattice linearization: i = ix * ny + iy (all zero-based).
constexpr std::size_t linear_index(std::size_t ix, std::size_t iy, std::size_t ny) noexcept {
  return ix * ny + iy;
}

/// Block network: heat capacities on the nodes, thermal conductances on the
/// edges. Immutable after construction; adjacency is kept in CSR form with
/// neighbours in ascending index order.
class Mesh {
 public:
  Mesh(std::vector<double> capacities, std::vector<Edge> edges,
       std::optional<GridShape> grid = std::nullopt);

  std::size_t size() const noexcept { return capacities_.size(); }
  std::span<const double> capacities() const noexcept { return capacities_; }
  double capacity(std::size_t i) const { return capacities_.at(i); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const std::optional<GridShape>& grid() const noexcept { return grid_; }

  /// Incident links of block i, ascending neighbour index. Throws invalid_id.
  std::span<const Neighbor> neighbors(BlockId i) const;

  /// Sum of conductances incident on block i (zero for an isolated block).
  double total_conductance(std::size_t i) const noexcept { return total_conductance_[i]; }
  std::span<const double> total_conductances() const noexcept { return total_conductance_; }

  bool has_isolated_blocks() const noexcept;
  /// Throws isolated_block naming the first block without neighbours.
  void require_no_isolated() const;

  /// max |a - b| over all edges; the half-bandwidth of the system operator.
  std::size_t bandwidth() const noexcept { return bandwidth_; }

  /// Number of connected components (union-find over the edges).
  std::size_t component_count() const;

  // Raw CSR view for hot loops.
  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const Neighbor> adjacency() const noexcept { return adjacency_; }

 private:
  std::vector<double> capacities_;
  std::vector<Edge> edges_;
  std::optional<GridShape> grid_;
  std::vector<std::size_t> row_offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> total_conductance_;
  std::size_t bandwidth_ = 0;
};

struct TemperatureField {
  std::vector<double> values;  // K
  double time = 0.0;           // s

  std::size_t size() const noexcept { return values.size(); }
  /// Throws size_mismatch if the length differs from the mesh, invalid_argument on non-finite values.
  void validate_for(const Mesh& mesh) const;
};

/// Base-10 exponent interval; samples are 10^x with x ~ U(lo, hi).
struct ExponentRange {
  double lo = 0.0;
  double hi = 1.0;
  friend bool operator==(const ExponentRange&, const ExponentRange&) = default;
};

struct UniformRandomInit {
  double lo = 0.0;
  double hi = 100.0;
  friend bool operator==(const UniformRandomInit&, const UniformRandomInit&) = default;
};

/// high_value on the 1-based inclusive band [i_lo, i_hi], low_value elsewhere.
struct RectangularPulse {
  std::size_t i_lo = 1;
  std::size_t i_hi = 1;
  double high_value = 100.0;
  double low_value = 0.0;
  friend bool operator==(const RectangularPulse&, const RectangularPulse&) = default;
};

using InitialCondition = std::variant<UniformRandomInit, RectangularPulse>;

/// Seeded recipe for a random lattice and its initial field.
struct ScenarioSpec {
  std::size_t nx = 1;
  std::size_t ny = 1;
  ExponentRange capacity_exponents;
  ExponentRange ux_exponents;
  ExponentRange uy_exponents;
  std::uint64_t seed = 0;
  InitialCondition initial_condition = UniformRandomInit{};
  double t0 = 0.0;
  double t_fin = 1.0;

  /// Throws invalid_dimension / invalid_argument.
  void validate() const;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// 10^x with x uniform on (exp_lo, exp_hi). Consumes exactly one draw.
double log_uniform_sample(SplitMix64& rng, double exp_lo, double exp_hi) noexcept;

/// Draw order: capacities in block order, then horizontal (x) edges, then
/// vertical (y) edges, each group ordered by the lower endpoint.
Mesh build_grid(const ScenarioSpec& scenario);

/// Uniform-random fields continue the scenario stream after the mesh draws.
TemperatureField initial_field(const Mesh& mesh, const ScenarioSpec& scenario);

std::vector<Neighbor> neighbors(const Mesh& mesh, BlockId i);

/// C_i / sum_j U_ij. Throws isolated_block when i has no neighbours.
double characteristic_time(const Mesh& mesh, BlockId i);

/// C = c * rho * V  [J/K]
double heat_capacity(double specific_heat, double density, double volume);
/// U = k * A / d  [W/K]
double thermal_conductance(double conductivity, double area, double distance);

}  // namespace blockheat
