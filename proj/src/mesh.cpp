#include "blockheat/mesh.hpp"

#include "blockheat/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace blockheat {
namespace {

std::vector<std::pair<std::size_t, std::size_t>> lattice_pairs(const GridShape& g) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve((g.nx - 1) * g.ny + g.nx * (g.ny - 1));
  for (std::size_t ix = 0; ix + 1 < g.nx; ++ix)
    for (std::size_t iy = 0; iy < g.ny; ++iy)
      pairs.emplace_back(linear_index(ix, iy, g.ny), linear_index(ix + 1, iy, g.ny));
  for (std::size_t ix = 0; ix < g.nx; ++ix)
    for (std::size_t iy = 0; iy + 1 < g.ny; ++iy)
      pairs.emplace_back(linear_index(ix, iy, g.ny), linear_index(ix, iy + 1, g.ny));
  return pairs;
}

void check_range(const ExponentRange& r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
    throw Error(ErrorCode::invalid_argument,
                std::string(name) + " exponent range must satisfy lo < hi");
}

}  // namespace

Mesh::Mesh(std::vector<double> capacities, std::vector<Edge> edges,
           std::optional<GridShape> grid)
    : capacities_(std::move(capacities)), edges_(std::move(edges)), grid_(grid) {
  const std::size_t n = capacities_.size();
  if (n == 0) throw Error(ErrorCode::invalid_dimension, "mesh must contain at least one block");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(capacities_[i]) || !(capacities_[i] > 0.0))
      throw Error(ErrorCode::invalid_argument,
                  "capacity of block " + std::to_string(i) + " must be positive and finite");
  }

  for (auto& e : edges_) {
    if (e.a >= n || e.b >= n)
      throw Error(ErrorCode::invalid_id, "edge endpoint out of range");
    if (e.a == e.b)
      throw Error(ErrorCode::invalid_argument,
                  "self-loop on block " + std::to_string(e.a));
    if (!std::isfinite(e.conductance) || !(e.conductance > 0.0))
      throw Error(ErrorCode::invalid_argument, "conductance must be positive and finite");
    if (e.a > e.b) std::swap(e.a, e.b);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(edges_.size());
  for (const auto& e : edges_) pairs.emplace_back(e.a, e.b);
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    throw Error(ErrorCode::invalid_argument, "duplicate edge between the same pair of blocks");

  if (grid_) {
    if (grid_->nx < 1 || grid_->ny < 1 || grid_->nx * grid_->ny != n)
      throw Error(ErrorCode::invalid_dimension, "grid shape does not match block count");
    auto expected = lattice_pairs(*grid_);
    std::sort(expected.begin(), expected.end());
    if (expected != pairs)
      throw Error(ErrorCode::invalid_argument, "edges are not the 4-neighbour lattice of the grid");
  }

  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges_) {
    ++degree[e.a];
    ++degree[e.b];
    bandwidth_ = std::max(bandwidth_, e.b - e.a);
  }
  row_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) row_offsets_[i + 1] = row_offsets_[i] + degree[i];
  adjacency_.resize(row_offsets_[n]);
  std::vector<std::size_t> cursor(row_offsets_.begin(), row_offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[cursor[e.a]++] = Neighbor{BlockId{e.b}, e.conductance};
    adjacency_[cursor[e.b]++] = Neighbor{BlockId{e.a}, e.conductance};
  }
  total_conductance_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    std::sort(first, last, [](const Neighbor& l, const Neighbor& r) { return l.id < r.id; });
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += it->conductance;
    total_conductance_[i] = sum;
  }
}

std::span<const Neighbor> Mesh::neighbors(BlockId i) const {
  if (i.index >= size())
    throw Error(ErrorCode::invalid_id, "block id " + std::to_string(i.index) + " out of range");
  return std::span<const Neighbor>(adjacency_).subspan(
      row_offsets_[i.index], row_offsets_[i.index + 1] - row_offsets_[i.index]);
}

bool Mesh::has_isolated_blocks() const noexcept {
  for (std::size_t i = 0; i < size(); ++i)
    if (row_offsets_[i] == row_offsets_[i + 1]) return true;
  return false;
}

void Mesh::require_no_isolated() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (row_offsets_[i] == row_offsets_[i + 1])
      throw Error(ErrorCode::isolated_block,
                  "block " + std::to_string(i) + " has no neighbours");
}

std::size_t Mesh::component_count() const {
  std::vector<std::size_t> parent(size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::size_t components = size();
  for (const auto& e : edges_) {
    auto ra = find(e.a), rb = find(e.b);
    if (ra != rb) {
      parent[std::max(ra, rb)] = std::min(ra, rb);
      --components;
    }
  }
  return components;
}

void TemperatureField::validate_for(const Mesh& mesh) const {
  if (values.size() != mesh.size())
    throw Error(ErrorCode::size_mismatch,
                "field has " + std::to_string(values.size()) + " values, mesh has " +
                    std::to_string(mesh.size()) + " blocks");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite temperature");
}

void ScenarioSpec::validate() const {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::invalid_dimension, "N_x and N_y must be >= 1");
  check_range(capacity_exponents, "capacity");
  check_range(ux_exponents, "U_x");
  check_range(uy_exponents, "U_y");
  if (!std::isfinite(t0) || !std::isfinite(t_fin) || !(t0 < t_fin))
    throw Error(ErrorCode::invalid_argument, "t0 must be < t_fin");
  if (const auto* u = std::get_if<UniformRandomInit>(&initial_condition)) {
    if (!std::isfinite(u->lo) || !std::isfinite(u->hi) || u->lo > u->hi)
      throw Error(ErrorCode::invalid_argument, "uniform-random initial range must satisfy lo <= hi");
  } else {
    const auto& p = std::get<RectangularPulse>(initial_condition);
    if (p.i_lo < 1 || p.i_lo > p.i_hi)
      throw Error(ErrorCode::invalid_argument, "pulse band must satisfy 1 <= i_lo <= i_hi");
    if (!std::isfinite(p.high_value) || !std::isfinite(p.low_value))
      throw Error(ErrorCode::invalid_argument, "pulse values must be finite");
  }
}

double log_uniform_sample(SplitMix64& rng, double exp_lo, double exp_hi) noexcept {
  const double x = exp_lo + (exp_hi - exp_lo) * rng.uniform01();
  return std::pow(10.0, x);
}

Mesh build_grid(const ScenarioSpec& scenario) {
  scenario.validate();
  const GridShape g{scenario.nx, scenario.ny};
  const std::size_t n = g.nx * g.ny;
  SplitMix64 rng(scenario.seed);

  std::vector<double> capacities(n);
  for (auto& c : capacities)
    c = log_uniform_sample(rng, scenario.capacity_exponents.lo, scenario.capacity_exponents.hi);

  const auto pairs = lattice_pairs(g);
  const std::size_t n_horizontal = (g.nx - 1) * g.ny;
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& range = k < n_horizontal ? scenario.ux_exponents : scenario.uy_exponents;
    edges.push_back(Edge{pairs[k].first, pairs[k].second,
                         log_uniform_sample(rng, range.lo, range.hi)});
  }
  return Mesh(std::move(capacities), std::move(edges), g);
}

TemperatureField initial_field(const Mesh& mesh, const ScenarioSpec& scenario) {
  scenario.validate();
  TemperatureField field{std::vector<double>(mesh.size()), scenario.t0};
  if (const auto* u = std::get_if<UniformRandomInit>(&scenario.initial_condition)) {
    SplitMix64 rng(scenario.seed);
    rng.discard(mesh.size() + mesh.edges().size());
    for (auto& v : field.values) v = u->lo + (u->hi - u->lo) * rng.uniform01();
    if (u->lo == u->hi) std::fill(field.values.begin(), field.values.end(), u->lo);
  } else {
    const auto& p = std::get<RectangularPulse>(scenario.initial_condition);
    if (p.i_hi > mesh.size())
      throw Error(ErrorCode::out_of_range, "pulse band end " + std::to_string(p.i_hi) +
                                               " exceeds block count " +
                                               std::to_string(mesh.size()));
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const std::size_t one_based = i + 1;
      field.values[i] = (one_based >= p.i_lo && one_based <= p.i_hi) ? p.high_value : p.low_value;
    }
  }
  return field;
}

std::vector<Neighbor> neighbors(const Mesh& mesh, BlockId i) {
  auto view = mesh.neighbors(i);
  return {view.begin(), view.end()};
}

double characteristic_time(const Mesh& mesh, BlockId i) {
  if (mesh.neighbors(i).empty())
    throw Error(ErrorCode::isolated_block,
                "block " + std::to_string(i.index) + " has no neighbours; tau is undefined");
  return mesh.capacity(i.index) / mesh.total_conductance(i.index);
}

double heat_capacity(double specific_heat, double density, double volume) {
  if (!(specific_heat > 0.0) || !(density > 0.0) || !(volume > 0.0))
    throw Error(ErrorCode::invalid_argument, "c, rho and V must be positive");
  return specific_heat * density * volume;
}

double thermal_conductance(double conductivity, double area, double distance) {
  if (!(conductivity > 0.0) || !(area > 0.0) || !(distance > 0.0))
    throw Error(ErrorCode::invalid_argument, "k, A and d must be positive");
  return conductivity * area / distance;
}

}  // namespace blockheat
