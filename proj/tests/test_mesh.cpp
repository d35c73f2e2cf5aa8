#include "blockheat/error.hpp"
#include "blockheat/experiments.hpp"
#include "blockheat/mesh.hpp"
#include "blockheat/system.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace blockheat;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected blockheat::Error");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("splitmix64 reference output") {
  // First output for seed 0 of the reference SplitMix64 generator.
  SplitMix64 rng(0);
  CHECK(rng.next() == 16294208416658607535ULL);
}

TEST_CASE("uniform01 stays strictly inside (0, 1)") {
  SplitMix64 rng(123);
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("discard skips draws exactly") {
  SplitMix64 a(99), b(99);
  for (int k = 0; k < 37; ++k) a.next();
  b.discard(37);
  CHECK(a.next() == b.next());
}

TEST_CASE("log_uniform_sample") {
  SUBCASE("range (-3, 2) stays inside (0.001, 100)") {
    SplitMix64 rng(5);
    for (int k = 0; k < 20000; ++k) {
      const double v = log_uniform_sample(rng, -3.0, 2.0);
      REQUIRE(v > 1e-3);
      REQUIRE(v < 100.0);
    }
  }
  SUBCASE("degenerate interval tends to 1") {
    SplitMix64 rng(5);
    CHECK(log_uniform_sample(rng, 0.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-11));
  }
  SUBCASE("seed 42 over (-1, 3) reproduces the recorded triple") {
    // Recorded once from this generator; an independent Python SplitMix64
    // gives 92.52508976090391, 0.43615571906385, 1.3013811774599504.
    SplitMix64 rng(42);
    const double a = log_uniform_sample(rng, -1.0, 3.0);
    const double b = log_uniform_sample(rng, -1.0, 3.0);
    const double c = log_uniform_sample(rng, -1.0, 3.0);
    CHECK(a == 0x1.7219b1215a2fep+6);
    CHECK(b == 0x1.be9f9ad55ed26p-2);
    CHECK(c == 0x1.4d27511cd209ap+0);
    CHECK(a == doctest::Approx(92.52508976090391).epsilon(1e-14));
    CHECK(b == doctest::Approx(0.43615571906385).epsilon(1e-14));
    CHECK(c == doctest::Approx(1.3013811774599504).epsilon(1e-14));
  }
  SUBCASE("1e5 draws: bounds and log-uniformity") {
    SplitMix64 rng(2024);
    const double a = -1.0, b = 3.0;
    const int n = 100000;
    double lo = INFINITY, hi = 0.0, mean = 0.0;
    for (int k = 0; k < n; ++k) {
      const double v = log_uniform_sample(rng, a, b);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += std::log10(v);
    }
    mean /= n;
    CHECK(lo > std::pow(10.0, a));
    CHECK(hi < std::pow(10.0, b));
    const double sigma = (b - a) / std::sqrt(12.0 * n);
    CHECK(std::abs(mean - 0.5 * (a + b)) < 3.0 * sigma);
  }
}

TEST_CASE("build_grid edge counts") {
  CHECK(build_grid(scenario_example1(1)).size() == 100);
  CHECK(build_grid(scenario_example1(1)).edges().size() == 180);
  const Mesh big = build_grid(scenario_example2(1));
  CHECK(big.size() == 4000);
  CHECK(big.edges().size() == 7590);

  for (std::size_t nx = 1; nx <= 6; ++nx)
    for (std::size_t ny = 1; ny <= 6; ++ny) {
      const Mesh m = build_grid(testing::small_example1(3, nx, ny));
      CHECK(m.edges().size() == (nx - 1) * ny + nx * (ny - 1));
    }
}

TEST_CASE("2x2 grid has the four-block topology") {
  const Mesh m = build_grid(testing::small_example1(7, 2, 2));
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : m.edges()) pairs.insert({e.a, e.b});
  // Column-major: blocks 0,1 form column 0 and 2,3 column 1.
  CHECK(pairs == std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

TEST_CASE("grid draw order: capacities, then x edges, then y edges") {
  const ScenarioSpec s = testing::small_example1(11, 3, 2);
  const Mesh m = build_grid(s);
  SplitMix64 rng(s.seed);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(m.capacity(i) == log_uniform_sample(rng, s.capacity_exponents.lo, s.capacity_exponents.hi));
  // x edges: (0,2) (1,3) (2,4) (3,5); y edges: (0,1) (2,3) (4,5)
  const std::vector<std::pair<std::size_t, std::size_t>> order = {{0, 2}, {1, 3}, {2, 4}, {3, 5},
                                                                  {0, 1}, {2, 3}, {4, 5}};
  REQUIRE(m.edges().size() == order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& r = k < 4 ? s.ux_exponents : s.uy_exponents;
    CHECK(m.edges()[k].a == order[k].first);
    CHECK(m.edges()[k].b == order[k].second);
    CHECK(m.edges()[k].conductance == log_uniform_sample(rng, r.lo, r.hi));
  }
}

TEST_CASE("same seed gives bit-identical mesh and field") {
  for (auto spec : {scenario_example1(17), scenario_example2(17)}) {
    const Mesh a = build_grid(spec), b = build_grid(spec);
    CHECK(std::equal(a.capacities().begin(), a.capacities().end(), b.capacities().begin()));
    for (std::size_t k = 0; k < a.edges().size(); ++k)
      CHECK(a.edges()[k].conductance == b.edges()[k].conductance);
    CHECK(initial_field(a, spec).values == initial_field(b, spec).values);
  }
  CHECK(build_grid(scenario_example1(1)).capacity(0) != build_grid(scenario_example1(2)).capacity(0));
}

TEST_CASE("initial_field") {
  SUBCASE("example-2 pulse") {
    const auto spec = scenario_example2(3);
    const auto f = initial_field(build_grid(spec), spec);
    CHECK(std::count(f.values.begin(), f.values.end(), 100.0) == 381);
    CHECK(std::count(f.values.begin(), f.values.end(), 0.0) == 3619);
    CHECK(f.values[398] == 0.0);  // 1-based 399
    CHECK(f.values[399] == 100.0);
    CHECK(f.values[779] == 100.0);
    CHECK(f.values[780] == 0.0);
  }
  SUBCASE("single hot block") {
    auto spec = testing::small_example1(1, 3, 3);
    spec.initial_condition = RectangularPulse{1, 1, 7.0, -1.0};
    const auto f = initial_field(build_grid(spec), spec);
    CHECK(f.values[0] == 7.0);
    CHECK(std::count(f.values.begin(), f.values.end(), -1.0) == 8);
  }
  SUBCASE("pulse count equals band width") {
    for (std::size_t lo = 1; lo <= 20; lo += 3)
      for (std::size_t hi = lo; hi <= 24; hi += 5) {
        auto spec = testing::small_example1(1, 6, 4);
        spec.initial_condition = RectangularPulse{lo, hi, 1.0, 0.0};
        const auto f = initial_field(build_grid(spec), spec);
        CHECK(static_cast<std::size_t>(std::count(f.values.begin(), f.values.end(), 1.0)) == hi - lo + 1);
      }
  }
  SUBCASE("degenerate uniform range") {
    auto spec = testing::small_example1(1, 3, 3);
    spec.initial_condition = UniformRandomInit{5.0, 5.0};
    const auto f = initial_field(build_grid(spec), spec);
    CHECK(std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 5.0; }));
  }
  SUBCASE("uniform range respected and time stamped at t0") {
    auto spec = scenario_example1(9);
    spec.t0 = 0.5;
    const auto f = initial_field(build_grid(spec), spec);
    CHECK(f.time == 0.5);
    CHECK(std::all_of(f.values.begin(), f.values.end(), [](double v) { return v > 0.0 && v < 100.0; }));
  }
  SUBCASE("band past the mesh is out of range") {
    auto spec = testing::small_example1(1, 2, 2);
    spec.initial_condition = RectangularPulse{2, 5, 1.0, 0.0};
    const Mesh m = build_grid(spec);
    CHECK(code_of([&] { initial_field(m, spec); }) == ErrorCode::out_of_range);
  }
}

TEST_CASE("neighbors") {
  const Mesh m = build_grid(testing::small_example1(5, 4, 3));
  CHECK(neighbors(m, BlockId{0}).size() == 2);
  CHECK(neighbors(m, BlockId{linear_index(3, 2, 3)}).size() == 2);
  CHECK(neighbors(m, BlockId{linear_index(1, 1, 3)}).size() == 4);
  CHECK(neighbors(m, BlockId{linear_index(1, 0, 3)}).size() == 3);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto nb = neighbors(m, BlockId{i});
    CHECK(std::is_sorted(nb.begin(), nb.end(), [](auto& l, auto& r) { return l.id < r.id; }));
  }
  const Mesh single({1.0}, {});
  CHECK(neighbors(single, BlockId{0}).empty());
  CHECK(code_of([&] { neighbors(m, BlockId{12}); }) == ErrorCode::invalid_id);
}

TEST_CASE("characteristic_time") {
  CHECK(characteristic_time(Mesh({2.0, 1.0}, {{0, 1, 4.0}}), BlockId{0}) == 0.5);
  const Mesh m({1.0, 1.0, 1.0}, {{0, 1, 1.0}, {0, 2, 3.0}});
  CHECK(characteristic_time(m, BlockId{0}) == 0.25);
  CHECK(code_of([] { characteristic_time(Mesh({1.0}, {}), BlockId{0}); }) == ErrorCode::isolated_block);

  // tau_i = -1 / M_ii of the assembled operator.
  const Mesh g = build_grid(scenario_example1(4));
  const auto op = assemble_operator(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(characteristic_time(g, BlockId{i}) == doctest::Approx(-1.0 / op.diagonal(i)).epsilon(1e-14));
}

TEST_CASE("mesh validation") {
  CHECK(code_of([] { Mesh({1.0, -1.0}, {{0, 1, 1.0}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { Mesh({1.0, NAN}, {{0, 1, 1.0}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { Mesh({1.0, 1.0}, {{0, 1, 0.0}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { Mesh({1.0, 1.0}, {{0, 1, INFINITY}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { Mesh({1.0, 1.0}, {{1, 1, 1.0}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { Mesh({1.0, 1.0}, {{0, 1, 1.0}, {1, 0, 2.0}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { Mesh({1.0, 1.0}, {{0, 2, 1.0}}); }) == ErrorCode::invalid_id);
  CHECK(code_of([] { Mesh({}, {}); }) == ErrorCode::invalid_dimension);
  // Grid metadata must match the lattice topology.
  CHECK(code_of([] { Mesh({1.0, 1.0, 1.0}, {{0, 1, 1.0}, {1, 2, 1.0}}, GridShape{2, 2}); }) ==
        ErrorCode::invalid_dimension);
  CHECK(code_of([] { Mesh({1, 1, 1, 1}, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {0, 3, 1.0}},
                          GridShape{2, 2}); }) == ErrorCode::invalid_argument);
  CHECK_NOTHROW(Mesh({1, 1, 1, 1}, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}}, GridShape{2, 2}));

  const Mesh isolated({1.0, 1.0, 1.0}, {{0, 1, 1.0}});
  CHECK(isolated.has_isolated_blocks());
  CHECK(code_of([&] { isolated.require_no_isolated(); }) == ErrorCode::isolated_block);
  CHECK(isolated.component_count() == 2);
}

TEST_CASE("scenario validation") {
  auto s = scenario_example1(1);
  s.nx = 0;
  CHECK(code_of([&] { build_grid(s); }) == ErrorCode::invalid_dimension);
  s = scenario_example1(1);
  s.ux_exponents = {2.0, 2.0};
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::invalid_argument);
  s = scenario_example1(1);
  s.t_fin = s.t0;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::invalid_argument);
}

TEST_CASE("physical parameter helpers") {
  CHECK(heat_capacity(900.0, 2700.0, 1e-3) == doctest::Approx(2430.0));
  CHECK(thermal_conductance(200.0, 0.01, 0.1) == doctest::Approx(20.0));
  CHECK_THROWS_AS(heat_capacity(0.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(thermal_conductance(1.0, 1.0, 0.0), Error);
}
