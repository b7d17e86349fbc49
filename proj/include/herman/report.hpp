#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace herman::reports {

using json = nlohmann::json;

inline constexpr const char* kToolName = "herman-lab";
inline constexpr const char* kToolVersion = "0.1.0";

/// Environment override for the default output directory (./reports).
inline constexpr const char* kReportDirEnv = "HERMAN_REPORT_DIR";

// ---------------------------------------------------------------------------
// One experiment = one command plus its effective parameters. `run` computes
// the payload and the pass/fail verdict of every invariant the command
// asserts; persistence is a separate, atomic step.
// ---------------------------------------------------------------------------

struct ExperimentSpec {
    std::string command; // exact | simulate | verify-recursion | verify-conjecture
                         // | scan-q | scan-ratio | distribution
    json parameters = json::object();
    std::string out_path;                 // empty: derived from command + spec hash
    bool force = false;                   // allow overwriting an existing report
    std::optional<std::string> csv_path;  // also render the tabular payload as CSV
};

struct Report {
    ExperimentSpec spec;
    std::string tool_version;
    std::string timestamp; // ISO-8601 UTC
    json results = json::object();
    json provenance = json::object(); // seed, arithmetic mode, kernel isa
    bool pass = false;
};

/// Dispatch to the owning module and assemble the report. Throws DomainError
/// for invalid specs and CapacityError when the request exceeds limits;
/// invariant violations are recorded in the report, not thrown.
Report run(const ExperimentSpec& spec);

json to_json(const Report& report);
Report report_from_json(const json& j);

/// FNV-1a over the canonical dump of {command, parameters}.
std::string spec_hash(const ExperimentSpec& spec);

/// Explicit out path, else <report dir>/<command>-<hash>.json.
std::filesystem::path resolve_out_path(const ExperimentSpec& spec);

/// Write-temp-then-rename; refuses to overwrite unless force.
void write_report(const Report& report, const std::filesystem::path& path, bool force);

/// Project the tabular payload (results["table"]) to CSV: header row, then
/// one row per entry, floats at 17 significant digits. DomainError if the
/// report has no tabular payload.
void render_csv(const Report& report, const std::filesystem::path& path);

/// 0 if every asserted invariant passed, 1 otherwise.
int exit_code(const Report& report);

} // namespace herman::reports
