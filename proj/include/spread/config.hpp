#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spread/data.hpp"
#include "spread/experiment.hpp"

namespace spread {

/// Invalid configuration; `line` is 1-based, 0 when no position applies.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class SourceKind { kSynthetic, kCheckin, kGenericCsv, kDump };
enum class Selection { kAll, kFirst, kRandom };

struct DatasetSource {
  SourceKind kind = SourceKind::kSynthetic;
  std::string path;  // input file (checkin, csv) or dump directory
  SyntheticConfig synthetic;
  std::optional<std::uint64_t> synthetic_seed;  // defaults to the master seed
  double accuracy_threshold_m = 25.0;
  std::optional<int> window_days;  // densest window for sparse check-in data
  Selection selection = Selection::kAll;
  std::size_t select_k = 0;
};

struct RunConfig {
  std::string profile = "default";
  DatasetSource dataset;
  ExperimentConfig experiment;
  std::string output_dir = "out";
  unsigned threads = 0;
};

/// Parameter defaults of a named profile ("default" or "gowalla").
DiffusionParams profile_defaults(const std::string& profile);

/// Parses and validates a JSON config. Durations carry their unit in the key
/// (mu_is_days, t_min_s, ...). Errors name the offending line of `text`.
RunConfig parse_config(const std::string& text, const std::string& source_name = "config");
RunConfig load_config(const std::string& path);

/// Every result-affecting setting, with defaults filled in. Parsing the dump
/// yields the same configuration. Output directory and thread count are
/// omitted because they do not change results.
nlohmann::ordered_json resolved_config(const RunConfig& config);

/// Loads or synthesizes the dataset described by the source.
Dataset load_source(const DatasetSource& source, std::uint64_t master_seed,
                    IngestStats* stats = nullptr);

}  // namespace spread
