#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spread/common.hpp"
#include "spread/mobility.hpp"

namespace spread {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

inline constexpr double kMetersPerDegree = 111320.0;
inline constexpr double kEarthRadiusM = 6371008.8;

/// Equirectangular projection about `origin` (x east, y north, meters).
Position project(const GeoPoint& p, const GeoPoint& origin);

/// Great-circle distance in meters.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

struct DatasetManifest {
  std::string dataset_id;
  std::int64_t epoch_unix_s = 0;  // UTC instant of t = 0
  GeoPoint origin;
  Seconds horizon_end = 0;
  std::size_t individuals = 0;
  std::size_t visits = 0;
};

struct Dataset {
  std::vector<Trajectory> trajectories;  // ascending id
  DatasetManifest manifest;

  std::vector<NodeId> ids() const;
};

// ---------------------------------------------------------------------------
// Ingestion

enum class TimeFormat { kUnixSeconds, kIso8601 };

/// Which columns hold what. With a header row, columns are matched by name;
/// without one, each entry must be a zero-based column index ("0", "1", ...).
struct ColumnMap {
  char delimiter = ',';
  bool has_header = true;
  std::string id = "id";
  std::string time = "t_unix_s";
  std::string lat = "lat";
  std::string lon = "lon";
  std::optional<std::string> accuracy = "acc_m";  // ignored when absent from the header
  TimeFormat time_format = TimeFormat::kUnixSeconds;

  /// Generic visit CSV: id,t_unix_s,lat,lon[,acc_m].
  static ColumnMap generic();
  /// Public check-in layout: tab-separated user, ISO-8601 time, lat, lon, venue id; no header.
  static ColumnMap checkin();
};

struct IngestOptions {
  ColumnMap columns;
  double accuracy_threshold_m = 25.0;
  std::optional<std::int64_t> epoch_unix_s;  // default: earliest kept visit floored to UTC midnight
  std::optional<GeoPoint> origin;            // default: centroid of kept rows
  std::string dataset_id = "dataset";
  Presence presence = Presence::kUntilHorizon;
};

struct IngestStats {
  std::size_t rows_in = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped_accuracy = 0;
  std::size_t rows_malformed = 0;
  std::size_t rows_deduplicated = 0;
  std::vector<std::string> malformed_examples;  // first few, with line numbers
};

struct IngestResult {
  Dataset dataset;
  IngestStats stats;
};

/// Parses "YYYY-MM-DDTHH:MM:SS[Z]" (UTC) into Unix seconds.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

/// Reads delimited visit records. Malformed rows are counted and skipped; a
/// mapped column missing from the header is fatal (InvalidInput). The horizon
/// ends at the UTC midnight following the last kept visit.
IngestResult ingest_csv(std::istream& in, const IngestOptions& options);
IngestResult ingest_csv_file(const std::string& path, const IngestOptions& options);

// ---------------------------------------------------------------------------
// Windows and subsets

/// Start (seconds) of the window of `length` whole days holding the most visits.
Seconds densest_window_start(std::span<const Trajectory> trajectories, Seconds length);

/// Visits in [start, start + length), shifted so that `start` becomes 0.
/// Individuals without visits in the window are dropped.
Dataset slice_window(const Dataset& dataset, Seconds start, Seconds length);

/// The k individuals with the smallest ids.
Dataset select_first(const Dataset& dataset, std::size_t k);
/// k individuals chosen uniformly without replacement.
Dataset select_random(const Dataset& dataset, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic mobility

struct SyntheticConfig {
  std::size_t individuals = 2000;
  int horizon_days = 30;
  std::size_t venues = 200;
  double home_spread_m = 5000.0;     // side of the square holding home anchors
  double daily_visit_rate = 2.0;     // Poisson mean of venue visits per day
  double dwell_mean_s = 3600.0;      // exponential venue dwell
  double intensity = 1.45;           // co-location knob: visitors crowd into footprint / sqrt(intensity)
  double venue_footprint_m = 40.0;
  double hotspot_skew = 1.0;         // Zipf exponent of venue popularity

  void validate() const;
};

/// Every individual starts at home at t = 0, makes Poisson-many venue trips per
/// day between 08:00 and 22:00 and returns home after an exponential dwell.
/// Venues are shared, which is what produces co-locations.
Dataset generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed);

/// Contacts per person per day.
double average_daily_colocations(std::size_t contacts, std::size_t individuals, Seconds horizon);

// ---------------------------------------------------------------------------
// Canonical dump

/// CSV id,t_s,x_m,y_m.
void write_visits_csv(std::ostream& out, const Dataset& dataset);
void write_manifest_json(std::ostream& out, const DatasetManifest& manifest);
DatasetManifest read_manifest_json(std::istream& in);

/// Reads a canonical dump back; the manifest supplies the horizon.
Dataset read_visits_csv(std::istream& in, const DatasetManifest& manifest,
                        Presence presence = Presence::kUntilHorizon);

/// Writes <dir>/visits.csv and <dir>/manifest.json.
void save_dataset(const std::string& dir, const Dataset& dataset);
Dataset load_dataset(const std::string& dir);

}  // namespace spread
