#include "blockheat/io.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace blockheat;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("blockheat_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

int run(const std::string& args, const Scratch& s) {
  const std::string cmd = std::string(BLOCKHEAT_CLI_PATH) + " " + args + " > " + (s / "stdout.txt") + " 2> " +
                          (s / "stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) { return io::read_text_file(path); }

TemperatureField read_field(const std::string& path) {
  std::istringstream in(slurp(path));
  return io::read_field_csv(in);
}

}  // namespace

TEST_CASE("cli generate") {
  Scratch s("generate");
  CHECK(run("generate --example2 --seed 7 --out " + (s / "a"), s) == 0);
  CHECK(slurp(s / "stdout.txt").find("hot_blocks 381") != std::string::npos);
  CHECK(run("generate --example2 --seed 7 --out " + (s / "b"), s) == 0);
  for (const char* f : {"scenario.json", "mesh.json", "init.csv"})
    CHECK(slurp(s / ("a/" + std::string(f))) == slurp(s / ("b/" + std::string(f))));

  CHECK(run("generate --example1 --out " + (s / "c"), s) == 0);
  const Mesh m = io::mesh_from_json(io::read_json_file(s / "c/mesh.json"));
  CHECK(m.size() == 100);
  CHECK(m.edges().size() == 180);
  // scenario.json regenerates the same lattice.
  CHECK(run("generate --scenario " + (s / "c/scenario.json") + " --out " + (s / "d"), s) == 0);
  CHECK(slurp(s / "c/mesh.json") == slurp(s / "d/mesh.json"));
}

TEST_CASE("cli solve round trip") {
  Scratch s("solve");
  REQUIRE(run("generate --example1 --seed 3 --out " + (s / "g"), s) == 0);
  const std::string base = "solve --mesh " + (s / "g/mesh.json") + " --init " + (s / "g/init.csv") + " --t-fin 0.1";
  REQUIRE(run(base + " --method exact --out " + (s / "exact"), s) == 0);
  REQUIRE(run(base + " --method cne --h 1e-5 --out " + (s / "cne"), s) == 0);
  const auto init = read_field(s / "g/init.csv");
  const auto exact = read_field(s / "exact/final.csv");
  const auto cne = read_field(s / "cne/final.csv");
  CHECK(cne.time == doctest::Approx(0.1));
  CHECK(max_deviation(cne, exact) < 1e-3 * testing::range_of(init.values));
  const auto summary = io::read_json_file(s / "cne/summary.json");
  CHECK(summary["run"]["steps_taken"] == 10000);

  CHECK(run(base + " --method dp --out " + (s / "dp"), s) == 0);
  CHECK(max_deviation(read_field(s / "dp/final.csv"), exact) < 1e-4 * testing::range_of(init.values));

  SUBCASE("euler above the stability limit exits 4") {
    CHECK(run(base + " --method euler --h 1e-3 --out " + (s / "eu"), s) == 4);
    CHECK(slurp(s / "stderr.txt").find("instability detected") != std::string::npos);
  }
  SUBCASE("bad input exits 2") {
    CHECK(run(base + " --method cne --out " + (s / "x"), s) == 2);
    CHECK(run(base + " --method rk4 --h 0.1 --out " + (s / "x"), s) == 2);
    CHECK(run(base + " --method cne --h -1 --out " + (s / "x"), s) == 2);
    CHECK(run("", s) == 2);
  }
  SUBCASE("missing file exits 3") {
    CHECK(run("solve --mesh " + (s / "none.json") + " --init " + (s / "g/init.csv") +
                  " --t-fin 1 --h 0.1 --out " + (s / "x"),
              s) == 3);
  }
  SUBCASE("trajectory output") {
    CHECK(run(base + " --method cne --h 0.05 --trajectory --out " + (s / "t"), s) == 0);
    const auto text = slurp(s / "t/trajectory.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  }
}

TEST_CASE("cli spectrum") {
  Scratch s("spectrum");
  REQUIRE(run("generate --example1 --out " + (s / "g"), s) == 0);
  CHECK(run("spectrum --mesh " + (s / "g/mesh.json") + " --out " + (s / "spec.json"), s) == 0);
  const auto j = io::read_json_file(s / "spec.json");
  const auto r = spectral_report(io::mesh_from_json(io::read_json_file(s / "g/mesh.json")));
  CHECK(j["stiffness_ratio"].get<double>() == r.stiffness_ratio);

  auto big = scenario_example1(1);
  big.nx = 101;
  big.ny = 100;
  io::write_json_file(s / "big.json", io::to_json(big));
  REQUIRE(run("generate --scenario " + (s / "big.json") + " --out " + (s / "big"), s) == 0);
  CHECK(run("spectrum --mesh " + (s / "big/mesh.json"), s) == 5);
}

TEST_CASE("cli scenario and converge") {
  Scratch s("misc");
  CHECK(run("scenario --example2 --seed 4 --out " + (s / "sc.json"), s) == 0);
  CHECK(io::scenario_from_json(io::read_json_file(s / "sc.json")).seed == 4);
  CHECK(run("converge --example1 --h-list 0.01,0.005,0.0025 --out " + (s / "conv"), s) == 0);
  CHECK(fs::exists(s / "conv/convergence.csv"));
  CHECK(run("converge --example1 --h-list 0.01,0.02,0.005", s) == 2);
}
