#pragma once

// Scenario files, run outputs and the command implementations behind the
// `ptgame` executable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptgame/certify.hpp"
#include "ptgame/scenarios.hpp"
#include "ptgame/solvers.hpp"

namespace ptgame::io {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitMaxIter = 2,
  kExitNotNash = 3,
  kExitBudget = 4,
  kExitUnreachable = 5,
  kExitSolverError = 6,
};

// ---------------------------------------------------------------------------
// Scenario schema

nlohmann::json scenario_to_json(const ScenarioDef& def);
/// Strict import: unknown keys and type mismatches raise ValidationError
/// carrying the dotted field path.
ScenarioDef scenario_from_json(const nlohmann::json& doc);
/// Parses text; syntax errors report line and column.
ScenarioDef parse_scenario(const std::string& text);
/// Sorted keys, two-space indent, shortest round-trip numbers, trailing newline.
std::string canonical_text(const ScenarioDef& def);
/// FNV-1a 64-bit digest as 16 hex digits.
std::string hash_hex(const std::string& text);
/// A built-in name, or a path to a scenario file.
ScenarioDef load_scenario(const std::string& name_or_path);

nlohmann::json config_to_json(const SolverConfig& cfg);
SolverConfig config_from_json(const nlohmann::json& doc, const std::string& path);

// ---------------------------------------------------------------------------
// Output files

/// Write to a sibling temp file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);
/// 17 significant digits.
std::string format_double(double v);
/// $PTGAME_OUT_DIR/leaf, or runs/leaf when the variable is unset.
std::filesystem::path default_out_dir(const std::string& leaf);

std::string trajectory_csv(const std::vector<Iterate>& iterates);
std::string timing_csv(const std::vector<Iterate>& iterates);
std::string paths_csv(const std::vector<std::vector<Iterate>>& paths);
std::string relay_csv(const std::vector<RelayEvent>& log);
std::string steering_csv(const SteeringTrace& trace);
/// Potential on a res x res grid over coordinates (i, j), others from base.
std::string contours_csv(const GameSpec& game, const JointStrategy& base, std::size_t i, std::size_t j,
                         std::size_t resolution);

nlohmann::json report_to_json(const CertificationReport& report);
nlohmann::json regularization_bound_to_json(const RegularizationBound& r);

/// Largest L1 distance between two agents' blocks (equal block sizes).
double max_pairwise_l1(const StrategySpace& space, const JointStrategy& x);

// ---------------------------------------------------------------------------
// Commands. Each returns a process exit code and writes diagnostics to err.

struct RunOptions {
  std::string scenario;
  std::string algo;
  std::optional<JointStrategy> x0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iter;
  std::string out;  // empty: default_out_dir
  std::size_t contour_resolution = 0;
  std::pair<std::size_t, std::size_t> contour_coords{0, 1};
};
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct CertifyOptions {
  std::string scenario;
  std::optional<JointStrategy> point;
  std::optional<std::size_t> resolution;
  std::optional<double> budget;
  double epsilon = 1e-6;
  std::string out;
};
int cmd_certify(const CertifyOptions& opt, std::ostream& out, std::ostream& err);

struct CompareOptions {
  std::string scenario;
  std::vector<std::string> algos{"aga", "ibr", "imm"};
  std::optional<JointStrategy> x0;
  std::optional<std::uint64_t> seed;
  double threshold = 1e-4;
  std::string out;
};
int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err);

struct SteerOptions {
  std::string scenario = "energy_community";
  SteeringConfig steer;
  std::optional<JointStrategy> x0;
  std::string out;
};
int cmd_steer(const SteerOptions& opt, std::ostream& out, std::ostream& err);

int cmd_list(std::ostream& out);
/// Canonical scenario text to `out_path`, or to `out` when the path is empty.
int cmd_export(const std::string& scenario, const std::string& out_path, std::ostream& out, std::ostream& err);

/// Runs one algorithm with the scenario's defaults for it.
Trajectory run_algorithm(const ScenarioDef& def, const std::string& algo, const JointStrategy& x0,
                         const SolverConfig& cfg);
/// Scenario defaults for algo with the flag-level overrides applied.
SolverConfig resolve_config(const ScenarioDef& def, const std::string& algo);

}  // namespace ptgame::io
