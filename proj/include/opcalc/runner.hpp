#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "opcalc/serialize.hpp"

namespace opcalc {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  /// Adds wall-clock seconds per task; reports then differ between runs.
  bool timings = false;
};

enum ExitCode : int { kExitOk = 0, kExitTaskFailed = 1, kExitParse = 2, kExitValidation = 3 };

struct RunOutcome {
  Json report;
  int exit_code = kExitOk;
};

/// Parses, validates and executes an experiment config. Never throws for bad
/// input; failures are reported with the matching exit code.
RunOutcome run_config(const std::string& config_text, const RunOptions& options = {});

/// Summary of a backend spec: hdim, point count, total mass, exactness, b2_rank.
Json describe_backend(const Json& spec);

/// Deterministic text rendering: two-space indent, trailing newline.
std::string dump_report(const Json& report);

/// Plain-text table of task verdicts and headline residuals.
std::string render_table(const Json& report);

}  // namespace opcalc
