#pragma once

#include "blockheat/experiments.hpp"
#include "blockheat/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace testing {

inline blockheat::Mesh two_block(double c1, double c2, double u) {
  return blockheat::Mesh({c1, c2}, {{0, 1, u}});
}

inline blockheat::TemperatureField field(std::vector<double> values, double time = 0.0) {
  return blockheat::TemperatureField{std::move(values), time};
}

/// Small lattice with the Example-1 parameter distribution.
inline blockheat::ScenarioSpec small_example1(std::uint64_t seed, std::size_t nx, std::size_t ny) {
  auto s = blockheat::scenario_example1(seed);
  s.nx = nx;
  s.ny = ny;
  return s;
}

inline double range_of(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace testing
