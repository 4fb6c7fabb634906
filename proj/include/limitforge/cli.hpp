#pragma once

// Experiment configs, the runner behind `limitforge run`, and report writers.
//
// Config text is a list of blocks:
//
//   # comment
//   [flagship]
//   family = first_order_inverse
//   f = t
//   a1 = 1
//   n_max = 1e7
//   law = catalog
//   tolerance = 1e-5
//
// Values are scalars or flat arrays `[a, b]`.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "limitforge/asymptote.hpp"
#include "limitforge/engine.hpp"
#include "limitforge/series.hpp"
#include "limitforge/verify.hpp"

namespace limitforge::cli {

inline constexpr const char* tool_version = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TaskKind { Recurrence, SumAlternating, Constant };
enum class OutputFormat { Csv, Json };

struct LawSelector {
  enum class Kind { Catalog, Closed, Predict, SecondTerm, None };
  Kind kind = Kind::Catalog;
  ClosedForm closed;
};

struct ExperimentConfig {
  std::string name;
  TaskKind task = TaskKind::Recurrence;
  std::optional<RecurrenceSpec> spec;

  // series tasks
  std::optional<FunctionExpr> series_f;
  std::string constant;  // "gamma" | "stieltjes"
  int alpha = 0;
  std::optional<double> expected;

  std::int64_t n_max = 0;
  CheckpointSchedule schedule;
  LawSelector law;
  std::vector<Stream> targets{Stream::Primary};
  double tolerance = 1e-6;
  OutputFormat format = OutputFormat::Csv;
  bool audit = true;
  bool classify = false;

  /// Effective key/value pairs, for the digest.
  std::map<std::string, std::string> entries;
};

struct Config {
  std::vector<ExperimentConfig> experiments;
};

/// Throws ConfigError naming the block and line on any problem.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);

/// Parses "1e7", "100000" etc. as a positive integer.
std::int64_t parse_count(std::string_view text);

/// SHA-256 over the effective config with keys and experiments sorted.
std::string config_digest(const Config& config);

struct Overrides {
  std::optional<double> tolerance;
  std::optional<std::int64_t> n_max;
  std::optional<CheckpointSchedule> schedule;
  std::optional<OutputFormat> format;
};

/// A smaller n_max drops config checkpoints beyond it; an overriding schedule
/// must fit within n_max.
void apply_overrides(Config& config, const Overrides& overrides);

enum class Status { Pass, Fail, Error };
const char* status_name(Status s);

struct ExperimentResult {
  std::string name;
  Status status = Status::Error;
  std::string message;
  std::vector<ConvergenceReport> reports;
  std::optional<AuditReport> audit;
  std::optional<IdentityAudit> identity;
  std::optional<LimitClassification> classification;
  std::optional<SeriesResult> series;
  std::optional<ConstantEstimate> constant;
  std::optional<double> expected;
  std::int64_t n_used = 0;
  std::optional<std::int64_t> terminated_at;
  double wall_seconds = 0.0;

  std::vector<double> final_ratios() const;
};

ExperimentResult run_experiment(const ExperimentConfig& experiment);

/// Header n,value,prediction,ratio,abs_ratio_err; numbers as %.17g.
std::string csv_table(const ConvergenceReport& report);
std::string csv_table(const ExperimentResult& result);
std::string json_report(const ExperimentResult& result);

/// Writes via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& contents);

struct RunOptions {
  std::string out_dir = ".";
  unsigned jobs = 1;
  std::string config_path;
};

std::string manifest_json(const Config& config, const RunOptions& options,
                          const std::vector<ExperimentResult>& results,
                          const std::vector<std::vector<std::string>>& outputs);

/// Runs every experiment and writes outputs plus manifest.json. Returns the
/// exit code: 0 all pass, 1 any fail, 2 any error.
int run_config(const Config& config, const RunOptions& options, std::ostream& log);

}  // namespace limitforge::cli
