#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ozawa/kernels.hpp"

namespace ozawa::cli {

/// A validated run configuration. The raw document is kept for the
/// construction-specific fields.
struct RunConfig {
  std::string construction;
  double R = 1;
  double epsilon = 0.5;
  std::optional<std::int64_t> window_radius;  // nullopt = "auto"
  double psd_tol = 1e-10;
  double support_eps = 1e-12;
  nlohmann::json doc;
};

/// Parses and validates a JSON config; throws Error(Schema) or Error(Parameter).
RunConfig parse_config(const std::string& text);

struct RunOptions {
  std::string out_dir;  // empty: no artifacts written
  unsigned threads = 1;
  std::optional<double> psd_tol;
  std::optional<double> support_eps;
};

/// Extra pass/fail checks beyond PSD, unity and width.
struct ExtraCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::optional<KernelReport> report;
  std::vector<ExtraCheck> extra;
  nlohmann::json diagnostics;
  std::vector<std::string> artifacts;  // file names inside out_dir
};

/// 0 all checks pass, 1 check failure, 2 schema or parameter error,
/// 3 window infeasible, 4 numerical error.
int exit_code_for(ErrorKind kind);

/// Builds the kernel, verifies it and writes kernel.csv, kernel.json,
/// window.json, report.json, diagnostics.json and summary.txt.
RunOutcome run(const RunConfig& config, const RunOptions& options);

/// Resource estimate without enumerating the window.
nlohmann::json plan(const RunConfig& config);

/// Re-checks out_dir/kernel.csv against out_dir/report.json (window from
/// out_dir/window.json). Returns 0 iff the recomputed report matches.
RunOutcome verify_saved(const std::string& out_dir, const RunOptions& options);

/// Entry point of the ozawa executable.
int main_entry(int argc, char** argv);

}  // namespace ozawa::cli
