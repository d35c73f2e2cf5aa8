// blockheat: generate random block lattices, integrate them, and report
// spectra, convergence sweeps and solver timings.

#include "blockheat/error.hpp"
#include "blockheat/experiments.hpp"
#include "blockheat/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace blockheat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;
constexpr int kExitTooLarge = 5;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return kExitIo;
    case ErrorCode::divergence:
    case ErrorCode::adaptive_failure: return kExitSolver;
    case ErrorCode::too_large: return kExitTooLarge;
    default: return kExitBadInput;
  }
}

std::optional<std::string> env(const char* name) {
  if (const char* v = std::getenv(name); v && *v) return std::string(v);
  return std::nullopt;
}

std::uint64_t default_seed() {
  if (auto v = env("BLOCKHEAT_SEED")) {
    try {
      return std::stoull(*v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "BLOCKHEAT_SEED is not an integer");
    }
  }
  return 1;
}

unsigned default_threads() {
  if (auto v = env("BLOCKHEAT_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(*v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "BLOCKHEAT_THREADS is not an integer");
    }
  }
  return 0;
}

struct ScenarioSource {
  std::string file;
  bool example1 = false;
  bool example2 = false;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app) {
    auto* f = app->add_option("--scenario", file, "Scenario JSON file");
    auto* e1 = app->add_flag("--example1", example1, "10x10 log-uniform lattice, t in [0, 1]");
    auto* e2 = app->add_flag("--example2", example2, "400x10 anisotropic lattice with pulse, t in [0, 100]");
    f->excludes(e1)->excludes(e2);
    e1->excludes(e2);
    seed_opt = app->add_option("--seed", seed, "RNG seed (env BLOCKHEAT_SEED, default 1)");
  }

  ScenarioSpec resolve() const {
    const std::uint64_t s = seed_opt->count() ? seed : default_seed();
    if (example1) return scenario_example1(s);
    if (example2) return scenario_example2(s);
    if (file.empty())
      throw Error(ErrorCode::invalid_argument, "one of --scenario, --example1, --example2 is required");
    ScenarioSpec spec = io::scenario_from_json(io::read_json_file(file));
    if (seed_opt->count()) spec.seed = seed;
    return spec;
  }
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

template <typename Writer>
void write_csv(const fs::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  io::write_text_file(path, out.str());
}

std::vector<double> parse_h_list(const std::string& text) {
  std::vector<double> h;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      h.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "bad --h-list entry '" + item + "'");
    }
  }
  return h;
}

std::string num(double v) { return io::format_double(v); }

// --- generate -------------------------------------------------------------

struct GenerateCmd {
  ScenarioSource source;
  std::string out;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("generate", "Build a lattice and initial field from a scenario");
    source.attach(app);
    app->add_option("--out", out, "Output directory (scenario.json, mesh.json, init.csv)")->required();
    app->callback([this] { run(); });
  }

  void run() const {
    const ScenarioSpec spec = source.resolve();
    const Mesh mesh = build_grid(spec);
    const TemperatureField init = initial_field(mesh, spec);
    ensure_dir(out);
    io::write_json_file(fs::path(out) / "scenario.json", io::to_json(spec));
    io::write_json_file(fs::path(out) / "mesh.json", io::to_json(mesh));
    write_csv(fs::path(out) / "init.csv", [&](std::ostream& o) { io::write_field_csv(o, init); });
    std::cout << "blocks " << mesh.size() << "\nedges " << mesh.edges().size() << "\n";
    if (const auto* p = std::get_if<RectangularPulse>(&spec.initial_condition)) {
      const auto hot = std::count(init.values.begin(), init.values.end(), p->high_value);
      std::cout << "hot_blocks " << hot << "\n";
    }
  }
};

// --- solve ----------------------------------------------------------------

struct SolveCmd {
  std::string mesh_path, init_path, method = "cne", out;
  double h = 0.0, rtol = 1e-7, atol = 1e-7, t_fin = 0.0;
  unsigned threads = 0;
  bool trajectory = false;
  CLI::Option* h_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("solve", "Integrate a mesh from an initial field");
    app->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
    app->add_option("--mesh", mesh_path, "Mesh JSON")->required();
    app->add_option("--init", init_path, "Initial field CSV")->required();
    app->add_option("--method", method, "cne | euler | dormand_prince | exact");
    h_opt = app->add_option("--h", h, "Fixed step size (cne, euler)");
    app->add_option("--rtol", rtol, "Relative tolerance (dormand_prince)");
    app->add_option("--atol", atol, "Absolute tolerance (dormand_prince)");
    app->add_option("--t-fin", t_fin, "Final time")->required();
    app->add_option("--out", out, "Output directory (final.csv, summary.json)")->required();
    app->add_flag("--trajectory", trajectory, "Also write trajectory.csv (n <= 1000)");
    threads_opt = app->add_option("--threads", threads, "Worker threads (env BLOCKHEAT_THREADS, default all cores)");
    app->callback([this] { run(); });
  }

  void run() const {
    const Mesh mesh = io::mesh_from_json(io::read_json_file(mesh_path));
    std::istringstream init_text(io::read_text_file(init_path));
    const TemperatureField init = io::read_field_csv(init_text);
    init.validate_for(mesh);

    SolverConfig config;
    config.method = parse_method(method);
    if ((config.method == Method::cne || config.method == Method::euler) && !h_opt->count())
      throw Error(ErrorCode::invalid_argument, "--h is required for method " + method);
    config.h = h;
    config.rtol = rtol;
    config.atol = atol;
    config.t0 = init.time;
    config.t_fin = t_fin;
    config.record_trajectory = trajectory;
    config.threads = threads_opt->count() ? threads : default_threads();
    if (trajectory && mesh.size() > io::kMaxTrajectoryColumns)
      throw Error(ErrorCode::too_large, "--trajectory is limited to 1000 blocks");

    const RunResult run = integrate(mesh, init, config);
    ensure_dir(out);
    write_csv(fs::path(out) / "final.csv", [&](std::ostream& o) { io::write_field_csv(o, run.final); });
    io::Json summary;
    summary["config"] = io::to_json(config);
    summary["run"] = io::run_summary(mesh, init, run);
    io::write_json_file(fs::path(out) / "summary.json", summary);
    if (trajectory)
      write_csv(fs::path(out) / "trajectory.csv",
                [&](std::ostream& o) { io::write_trajectory_csv(o, run.trajectory); });
    std::cout << "method " << to_string(config.method) << "\nsteps " << run.steps_taken
              << "\nrejected " << run.steps_rejected << "\nwall_time " << run.wall_time
              << "\nebe " << num(energy_balance_error(mesh, init, run.final)) << "\n";
  }
};

// --- spectrum -------------------------------------------------------------

struct SpectrumCmd {
  std::string mesh_path, out;
  bool eigenvalues = false;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("spectrum", "Eigenvalues, stiffness ratio and Euler step limit");
    app->add_option("--mesh", mesh_path, "Mesh JSON")->required();
    app->add_option("--out", out, "Write the report as JSON to this file");
    app->add_flag("--eigenvalues", eigenvalues, "Include the full eigenvalue list in the JSON");
    app->callback([this] { run(); });
  }

  void run() const {
    const Mesh mesh = io::mesh_from_json(io::read_json_file(mesh_path));
    const SpectralReport r = spectral_report(mesh);
    if (!out.empty()) io::write_json_file(out, io::to_json(r, eigenvalues));
    std::cout << "blocks " << mesh.size() << "\nlambda_max_abs " << num(r.lambda_max_abs)
              << "\nstiffness_ratio " << num(r.stiffness_ratio) << "\neuler_h_max "
              << num(r.euler_h_max) << "\nzero_modes " << r.zero_mode_count << "\ncomponents "
              << r.component_count << "\n";
  }
};

// --- converge -------------------------------------------------------------

struct ConvergeCmd {
  ScenarioSource source;
  std::string h_list, out;
  unsigned threads = 0;
  CLI::Option* threads_opt = nullptr;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("converge", "CNe error sweep against the spectral oracle");
    source.attach(app);
    app->add_option("--h-list", h_list, "Comma-separated decreasing step sizes (default span/2^k, k=1..10)");
    app->add_option("--out", out, "Output directory (convergence.csv, convergence.json)");
    threads_opt = app->add_option("--threads", threads, "Worker threads");
    app->callback([this] { run(); });
  }

  void run() const {
    const ScenarioSpec spec = source.resolve();
    const auto hs = h_list.empty() ? halving_step_sizes(spec.t_fin - spec.t0, 10) : parse_h_list(h_list);
    const auto r = run_convergence_sweep(spec, hs, threads_opt->count() ? threads : default_threads());
    if (!out.empty()) {
      ensure_dir(out);
      write_csv(fs::path(out) / "convergence.csv", [&](std::ostream& o) { io::write_convergence_csv(o, r); });
      io::write_json_file(fs::path(out) / "convergence.json", io::to_json(r));
    }
    io::write_convergence_csv(std::cout, r);
    std::cout << "# slope fit over smallest " << r.fit_points << " h: max_d " << num(r.slope_max_d)
              << ", sum_d " << num(r.slope_sum_d) << ", abs_ebe " << num(r.slope_abs_ebe) << "\n";
  }
};

// --- compare --------------------------------------------------------------

struct CompareCmd {
  ScenarioSource source;
  std::string out;
  int reps = kTimingRepetitions;
  unsigned threads = 0;
  CLI::Option* threads_opt = nullptr;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("compare", "Wall time and accuracy: CNe vs Dormand-Prince");
    source.attach(app);
    app->add_option("--reps", reps, "Timing repetitions (median reported)");
    app->add_option("--out", out, "Output directory (report.json, profile.csv)");
    threads_opt = app->add_option("--threads", threads, "Worker threads");
    app->callback([this] { run(); });
  }

  void run() const {
    const ScenarioSpec spec = source.resolve();
    const auto r = run_speed_comparison(spec, reps, threads_opt->count() ? threads : default_threads());
    if (!out.empty()) {
      ensure_dir(out);
      io::write_json_file(fs::path(out) / "report.json", io::to_json(r));
      const Mesh mesh = build_grid(spec);
      write_csv(fs::path(out) / "profile.csv", [&](std::ostream& o) { io::write_profile_csv(o, mesh, r); });
    }
    std::cout << std::left << std::setw(16) << "method" << std::setw(14) << "h|tol" << std::setw(10)
              << "steps" << std::setw(14) << "wall_s" << std::setw(14) << "max_d" << std::setw(14)
              << "sum_d" << "ebe\n";
    for (const auto& rec : r.runs) {
      const double knob = rec.config.method == Method::dormand_prince ? rec.config.rtol : rec.config.h;
      std::cout << std::setw(16) << to_string(rec.config.method) << std::setw(14) << num(knob)
                << std::setw(10) << rec.result.steps_taken << std::setw(14) << rec.result.wall_time
                << std::setw(14) << rec.errors.max_d << std::setw(14) << rec.errors.sum_d
                << rec.errors.ebe << "\n";
    }
    std::cout << "stiffness_ratio " << num(r.spectral.stiffness_ratio) << "\neuler_h_max "
              << num(r.spectral.euler_h_max) << "\n";
  }
};

// --- scenario -------------------------------------------------------------

struct ScenarioCmd {
  ScenarioSource source;
  std::string out;

  void attach(CLI::App& root) {
    auto* app = root.add_subcommand("scenario", "Print or write a scenario JSON");
    source.attach(app);
    app->add_option("--out", out, "Write to this file instead of stdout");
    app->callback([this] { run(); });
  }

  void run() const {
    const auto j = io::to_json(source.resolve());
    if (out.empty())
      std::cout << j.dump(2) << "\n";
    else
      io::write_json_file(out, j);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit exponential heat-conduction solver for block meshes"};
  app.require_subcommand(1);
  GenerateCmd generate;
  SolveCmd solve;
  SpectrumCmd spectrum;
  ConvergeCmd converge;
  CompareCmd compare;
  ScenarioCmd scenario;
  generate.attach(app);
  solve.attach(app);
  spectrum.attach(app);
  converge.attach(app);
  compare.attach(app);
  scenario.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitBadInput;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}
