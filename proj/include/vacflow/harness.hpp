#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vacflow/checkpoint.hpp"
#include "vacflow/config.hpp"
#include "vacflow/diagnostics.hpp"

namespace vacflow {

inline constexpr const char* kCsvSchemaLine = "# vacflow diagnostics v1";

std::string csv_header(const DiagnosticsConfig& cfg);
/// One row; numbers are printed with 17 significant digits.
std::string csv_row(const DiagnosticsRecord& r, int pressure_iterations = 0, int viscous_iterations = 0);
/// Parses the rows of a diagnostics.csv written with `cfg`.
std::vector<DiagnosticsRecord> read_csv(const std::string& path, const DiagnosticsConfig& cfg);

struct RunOptions {
  /// Output directory; empty selects config.output.
  std::string out_dir;
  /// Checkpoint to resume from; empty starts from the initial data.
  std::string resume;
  /// Stops (after writing a checkpoint) once this many steps exist; for
  /// interruption tests. Negative means no limit.
  long stop_at_step = -1;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
};

struct RunResult {
  /// 0 success, 2 configuration error, 3 solver error.
  int exit_code = 0;
  std::string status;
  std::string message;
  std::string out_dir;
  nlohmann::json summary;
  std::vector<DiagnosticsRecord> records;
};

/// Runs to config.t_end writing diagnostics.csv, ckpt_<step>.bin and
/// summary.json into the output directory. Configuration problems raise
/// ConfigError; solver failures are reported through the exit code.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// Config stored inside a checkpoint, with the output directory cleared.
RunConfig checkpoint_config(const Checkpoint& c);

/// One run per epsilon (as init.target_h12) in out_dir/eps_<epsilon>; writes
/// out_dir/sweep.json and returns its content.
nlohmann::json sweep(const RunConfig& config, const std::vector<double>& epsilons, const std::string& out_dir,
                     std::ostream* log = nullptr);

/// Recomputes the diagnostics record of each checkpoint. With several
/// checkpoints the trapezoidal A over their times is reported as well.
nlohmann::json diag(const std::vector<std::string>& checkpoints);

nlohmann::json record_to_json(const DiagnosticsRecord& r);

std::string checkpoint_name(long step);

}  // namespace vacflow
