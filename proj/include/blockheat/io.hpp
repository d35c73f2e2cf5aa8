#pragma once

#include "blockheat/experiments.hpp"
#include "blockheat/mesh.hpp"
#include "blockheat/metrics.hpp"
#include "blockheat/solvers.hpp"
#include "blockheat/system.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

namespace blockheat::io {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double value);

// Scenario files mirror ScenarioSpec field for field.
Json to_json(const ScenarioSpec& scenario);
ScenarioSpec scenario_from_json(const Json& j);

// {"n_blocks", "grid": {"nx","ny"} | null, "capacities": [...], "edges": [[a, b, U], ...]}
Json to_json(const Mesh& mesh);
Mesh mesh_from_json(const Json& j);

Json to_json(const SpectralReport& report, bool include_eigenvalues);
Json to_json(const ErrorReport& report);
Json to_json(const ConvergenceReport& report);
Json to_json(const SolverConfig& config);
/// Summary only: steps, wall time, final time; EBE added when `initial` is given.
Json run_summary(const Mesh& mesh, const TemperatureField& initial, const RunResult& run);
Json to_json(const ExperimentResult& result);

/// "block,time,temperature" with 1-based block numbers.
void write_field_csv(std::ostream& out, const TemperatureField& field);
TemperatureField read_field_csv(std::istream& in);

/// One row per snapshot: time followed by one column per block. Throws too_large above 1000 blocks.
inline constexpr std::size_t kMaxTrajectoryColumns = 1000;
void write_trajectory_csv(std::ostream& out, const std::vector<TemperatureField>& trajectory);

/// "h,max_d,sum_d,abs_ebe"
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

/// "block,ix,iy,initial,cne,reference": final fields along the lattice, 1-based.
void write_profile_csv(std::ostream& out, const Mesh& mesh, const ExperimentResult& result);

// File helpers; failures raise ErrorCode::io.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace blockheat::io
