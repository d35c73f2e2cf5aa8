#include "blockheat/error.hpp"
#include "blockheat/io.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

using namespace blockheat;

TEST_CASE("format_double round-trips") {
  SplitMix64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(rng.uniform01() - 0.5, static_cast<int>(rng.next() % 200) - 100);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(100.0) == "100");
}

TEST_CASE("scenario json round trip") {
  for (const auto& spec : {scenario_example1(9), scenario_example2(9)}) {
    const auto j = io::to_json(spec);
    const auto back = io::scenario_from_json(io::Json::parse(j.dump()));
    CHECK(io::to_json(back) == j);
    CHECK(back.seed == 9);
    const Mesh a = build_grid(spec), b = build_grid(back);
    CHECK(std::equal(a.capacities().begin(), a.capacities().end(), b.capacities().begin()));
  }
  CHECK(io::to_json(scenario_example2(1))["initial_condition"]["type"] == "rectangular_pulse");
  CHECK(io::to_json(scenario_example1(1))["initial_condition"]["type"] == "uniform_random");
}

TEST_CASE("scenario json rejects bad input") {
  auto j = io::to_json(scenario_example1(1));
  SUBCASE("missing key") { j.erase("nx"); }
  SUBCASE("wrong type") { j["nx"] = "ten"; }
  SUBCASE("unknown initial condition") { j["initial_condition"]["type"] = "gaussian"; }
  SUBCASE("empty interval") { j["t_fin"] = 0.0; }
  CHECK_THROWS_AS(io::scenario_from_json(j), Error);
}

TEST_CASE("mesh json round trip is bit exact") {
  const Mesh g = build_grid(scenario_example1(4));
  const Mesh back = io::mesh_from_json(io::Json::parse(io::to_json(g).dump()));
  REQUIRE(back.size() == g.size());
  CHECK(std::equal(g.capacities().begin(), g.capacities().end(), back.capacities().begin()));
  REQUIRE(back.edges().size() == g.edges().size());
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    CHECK(back.edges()[k].a == g.edges()[k].a);
    CHECK(back.edges()[k].conductance == g.edges()[k].conductance);
  }
  REQUIRE(back.grid());
  CHECK(back.grid()->nx == 10);

  auto bad = io::to_json(g);
  bad["capacities"][0] = -1.0;
  CHECK_THROWS_AS(io::mesh_from_json(bad), Error);
}

TEST_CASE("field csv") {
  const auto f = testing::field({1.5, -2.0, 0.1}, 0.25);
  std::ostringstream out;
  io::write_field_csv(out, f);
  CHECK(out.str().rfind("block,time,temperature\n1,0.25,1.5\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = io::read_field_csv(in);
  CHECK(back.values == f.values);
  CHECK(back.time == 0.25);

  std::istringstream gap("block,time,temperature\n1,0,1\n3,0,2\n");
  CHECK_THROWS_AS(io::read_field_csv(gap), Error);
  std::istringstream junk("block,time,temperature\n1,0,abc\n");
  CHECK_THROWS_AS(io::read_field_csv(junk), Error);
  std::istringstream nan_row("block,time,temperature\n1,0,nan\n");
  CHECK_THROWS_AS(io::read_field_csv(nan_row), Error);
}

TEST_CASE("trajectory and convergence csv") {
  std::ostringstream out;
  io::write_trajectory_csv(out, {testing::field({1, 2}), testing::field({3, 4}, 0.5)});
  CHECK(out.str() == "time,T1,T2\n0,1,2\n0.5,3,4\n");

  std::vector<TemperatureField> wide{testing::field(std::vector<double>(1001, 0.0))};
  std::ostringstream sink;
  try {
    io::write_trajectory_csv(sink, wide);
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::too_large);
  }

  ConvergenceReport r;
  r.h_values = {0.5};
  r.max_d = {1};
  r.sum_d = {2};
  r.ebe = {-3};
  std::ostringstream c;
  io::write_convergence_csv(c, r);
  CHECK(c.str() == "h,max_d,sum_d,abs_ebe\n0.5,1,2,3\n");
}

TEST_CASE("file helpers report io errors") {
  try {
    io::read_json_file("/nonexistent/dir/x.json");
    FAIL("expected io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
  const auto tmp = std::filesystem::temp_directory_path() / "blockheat_io_test.json";
  io::write_text_file(tmp, "{not json");
  try {
    io::read_json_file(tmp);
    FAIL("expected invalid_argument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
  std::filesystem::remove(tmp);
}
