#include "blockheat/io.hpp"

#include "blockheat/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace blockheat::io {
namespace {

Json range_json(const ExponentRange& r) { return Json::array({r.lo, r.hi}); }

ExponentRange range_from(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2)
    throw Error(ErrorCode::invalid_argument, std::string(key) + " must be a [lo, hi] pair");
  return ExponentRange{v[0].get<double>(), v[1].get<double>()};
}

/// Converts nlohmann type/missing-key errors into library errors.
template <typename F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed ") + what + ": " + e.what());
  }
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::invalid_argument, "not a number: '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? line.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorCode::io, "failed to format number");
  return std::string(buf, ptr);
}

Json to_json(const ScenarioSpec& s) {
  Json ic;
  if (const auto* u = std::get_if<UniformRandomInit>(&s.initial_condition)) {
    ic["type"] = "uniform_random";
    ic["lo"] = u->lo;
    ic["hi"] = u->hi;
  } else {
    const auto& p = std::get<RectangularPulse>(s.initial_condition);
    ic["type"] = "rectangular_pulse";
    ic["i_lo"] = p.i_lo;
    ic["i_hi"] = p.i_hi;
    ic["high_value"] = p.high_value;
    ic["low_value"] = p.low_value;
  }
  Json j;
  j["nx"] = s.nx;
  j["ny"] = s.ny;
  j["capacity_exponent_range"] = range_json(s.capacity_exponents);
  j["ux_exponent_range"] = range_json(s.ux_exponents);
  j["uy_exponent_range"] = range_json(s.uy_exponents);
  j["seed"] = s.seed;
  j["initial_condition"] = std::move(ic);
  j["t0"] = s.t0;
  j["t_fin"] = s.t_fin;
  return j;
}

ScenarioSpec scenario_from_json(const Json& j) {
  ScenarioSpec s = parse_guard("scenario", [&] {
    ScenarioSpec out;
    out.nx = j.at("nx").get<std::size_t>();
    out.ny = j.at("ny").get<std::size_t>();
    out.capacity_exponents = range_from(j, "capacity_exponent_range");
    out.ux_exponents = range_from(j, "ux_exponent_range");
    out.uy_exponents = range_from(j, "uy_exponent_range");
    out.seed = j.at("seed").get<std::uint64_t>();
    out.t0 = j.at("t0").get<double>();
    out.t_fin = j.at("t_fin").get<double>();
    const auto& ic = j.at("initial_condition");
    const auto type = ic.at("type").get<std::string>();
    if (type == "uniform_random") {
      out.initial_condition = UniformRandomInit{ic.at("lo").get<double>(), ic.at("hi").get<double>()};
    } else if (type == "rectangular_pulse") {
      out.initial_condition =
          RectangularPulse{ic.at("i_lo").get<std::size_t>(), ic.at("i_hi").get<std::size_t>(),
                           ic.at("high_value").get<double>(), ic.at("low_value").get<double>()};
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown initial_condition type '" + type + "'");
    }
    return out;
  });
  s.validate();
  return s;
}

Json to_json(const Mesh& mesh) {
  Json j;
  j["n_blocks"] = mesh.size();
  if (mesh.grid())
    j["grid"] = Json{{"nx", mesh.grid()->nx}, {"ny", mesh.grid()->ny}};
  else
    j["grid"] = nullptr;
  j["capacities"] = Json(std::vector<double>(mesh.capacities().begin(), mesh.capacities().end()));
  Json edges = Json::array();
  for (const auto& e : mesh.edges()) edges.push_back(Json::array({e.a, e.b, e.conductance}));
  j["edges"] = std::move(edges);
  return j;
}

Mesh mesh_from_json(const Json& j) {
  return parse_guard("mesh", [&] {
    auto capacities = j.at("capacities").get<std::vector<double>>();
    if (j.contains("n_blocks") && j.at("n_blocks").get<std::size_t>() != capacities.size())
      throw Error(ErrorCode::invalid_argument, "n_blocks does not match capacities length");
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3)
        throw Error(ErrorCode::invalid_argument, "edge entries must be [a, b, conductance]");
      edges.push_back(Edge{e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
    }
    std::optional<GridShape> grid;
    if (j.contains("grid") && !j.at("grid").is_null())
      grid = GridShape{j.at("grid").at("nx").get<std::size_t>(), j.at("grid").at("ny").get<std::size_t>()};
    return Mesh(std::move(capacities), std::move(edges), grid);
  });
}

Json to_json(const SpectralReport& r, bool include_eigenvalues) {
  Json j;
  j["lambda_max_abs"] = r.lambda_max_abs;
  j["smallest_nonzero_abs"] = r.smallest_nonzero_abs;
  j["stiffness_ratio"] = r.stiffness_ratio;
  j["euler_h_max"] = r.euler_h_max;
  j["zero_mode_count"] = r.zero_mode_count;
  j["component_count"] = r.component_count;
  j["n_eigenvalues"] = r.eigenvalues.size();
  if (include_eigenvalues) j["eigenvalues"] = r.eigenvalues;
  return j;
}

Json to_json(const ErrorReport& r) {
  return Json{{"max_d", r.max_d}, {"sum_d", r.sum_d}, {"ebe", r.ebe}};
}

Json to_json(const ConvergenceReport& r) {
  Json j;
  j["h_values"] = r.h_values;
  j["max_d"] = r.max_d;
  j["sum_d"] = r.sum_d;
  j["ebe"] = r.ebe;
  j["fit_points"] = r.fit_points;
  j["slope_max_d"] = r.slope_max_d;
  j["slope_sum_d"] = r.slope_sum_d;
  j["slope_abs_ebe"] = r.slope_abs_ebe;
  j["halving_ratio"] = r.halving_ratio();
  return j;
}

Json to_json(const SolverConfig& c) {
  Json j;
  j["method"] = std::string(to_string(c.method));
  if (c.method == Method::cne || c.method == Method::euler) j["h"] = c.h;
  if (c.method == Method::dormand_prince) {
    j["rtol"] = c.rtol;
    j["atol"] = c.atol;
  }
  j["t0"] = c.t0;
  j["t_fin"] = c.t_fin;
  return j;
}

Json run_summary(const Mesh& mesh, const TemperatureField& initial, const RunResult& run) {
  Json j;
  j["final_time"] = run.final.time;
  j["steps_taken"] = run.steps_taken;
  j["steps_rejected"] = run.steps_rejected;
  j["wall_time"] = run.wall_time;
  j["ebe"] = energy_balance_error(mesh, initial, run.final);
  j["total_energy_initial"] = total_energy(mesh, initial);
  return j;
}

Json to_json(const ExperimentResult& r) {
  Json j;
  j["scenario"] = to_json(r.scenario);
  j["spectral"] = to_json(r.spectral, false);
  Json runs = Json::array();
  for (const auto& rec : r.runs) {
    Json run;
    run["config"] = to_json(rec.config);
    run["steps_taken"] = rec.result.steps_taken;
    run["steps_rejected"] = rec.result.steps_rejected;
    run["wall_time_median"] = rec.result.wall_time;
    run["errors"] = to_json(rec.errors);
    runs.push_back(std::move(run));
  }
  j["runs"] = std::move(runs);
  if (r.convergence) j["convergence"] = to_json(*r.convergence);
  return j;
}

void write_field_csv(std::ostream& out, const TemperatureField& field) {
  out << "block,time,temperature\n";
  const std::string t = format_double(field.time);
  for (std::size_t i = 0; i < field.size(); ++i)
    out << (i + 1) << ',' << t << ',' << format_double(field.values[i]) << '\n';
}

TemperatureField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::invalid_argument, "empty field file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "block,time,temperature")
    throw Error(ErrorCode::invalid_argument, "unexpected field header '" + line + "'");
  TemperatureField field;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3) throw Error(ErrorCode::invalid_argument, "field rows need 3 columns");
    ++row;
    if (parse_double(parts[0]) != static_cast<double>(row))
      throw Error(ErrorCode::invalid_argument, "field rows must list blocks 1..n in order");
    const double t = parse_double(parts[1]);
    if (row == 1) field.time = t;
    else if (t != field.time) throw Error(ErrorCode::invalid_argument, "mixed time stamps in field file");
    const double v = parse_double(parts[2]);
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "non-finite temperature in field file");
    field.values.push_back(v);
  }
  return field;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TemperatureField>& trajectory) {
  if (trajectory.empty()) return;
  const std::size_t n = trajectory.front().size();
  if (n > kMaxTrajectoryColumns)
    throw Error(ErrorCode::too_large, "trajectory CSV is limited to " +
                                          std::to_string(kMaxTrajectoryColumns) + " blocks");
  out << "time";
  for (std::size_t i = 0; i < n; ++i) out << ",T" << (i + 1);
  out << '\n';
  for (const auto& snap : trajectory) {
    out << format_double(snap.time);
    for (double v : snap.values) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& r) {
  out << "h,max_d,sum_d,abs_ebe\n";
  for (std::size_t k = 0; k < r.h_values.size(); ++k)
    out << format_double(r.h_values[k]) << ',' << format_double(r.max_d[k]) << ','
        << format_double(r.sum_d[k]) << ',' << format_double(std::abs(r.ebe[k])) << '\n';
}

void write_profile_csv(std::ostream& out, const Mesh& mesh, const ExperimentResult& result) {
  const TemperatureField* cne = nullptr;
  for (const auto& rec : result.runs)
    if (rec.config.method == Method::cne) cne = &rec.result.final;
  out << "block,ix,iy,initial,cne,reference\n";
  const std::size_t ny = mesh.grid() ? mesh.grid()->ny : 1;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    out << (i + 1) << ',' << (i / ny + 1) << ',' << (i % ny + 1) << ','
        << format_double(result.initial.values[i]) << ','
        << (cne ? format_double(cne->values[i]) : std::string()) << ','
        << format_double(result.reference.values[i]) << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::invalid_argument, "invalid JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace blockheat::io
