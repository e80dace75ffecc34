#pragma once

// Batch command-line front end: design, tune, table, verify.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oscswap/invariants.hpp"
#include "oscswap/io.hpp"

namespace oscswap::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDesign = 2, kTuning = 3, kVerification = 4 };

struct RunConfig {
  std::string subcommand;
  double w1 = 1.0;
  double w2 = 5.0;
  double tf = 5.0;
  std::optional<double> lambda;
  double gamma = kHalfPi;
  int samples = 2001;
  int steps = kDefaultTrajectorySteps;
  int grid = 256;
  std::optional<double> dt;  // split-operator step; default tf / 2^14
  int cutoff = 6;
  int snapshots = 9;
  int mesh_nodes = 0;  // 0: sized per label
  int record_points = 256;
  std::vector<double> lambda_window{0.0, 40.0};
  double scan_step = 0.25;
  std::vector<double> tf_range;  // lo, hi, step
  std::vector<FockLabel> states;
  std::string out = ".";
  std::string format = "both";  // json | csv | both

  bool want_json() const { return format != "csv"; }
  bool want_csv() const { return format != "json"; }
  int split_steps() const;
  io::json to_json() const;
};

/// Table I initial states.
std::vector<FockLabel> table_labels();

/// "n,k" -> FockLabel; throws InvalidInput.
FockLabel parse_label(const std::string& text);

void cmd_design(const RunConfig& config, std::ostream& log);
void cmd_tune(const RunConfig& config, std::ostream& log);
void cmd_table(const RunConfig& config, std::ostream& log);
void cmd_verify(const RunConfig& config, std::ostream& log);

/// Parses arguments, dispatches, and maps library errors onto ExitCode.
int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

}  // namespace oscswap::cli
