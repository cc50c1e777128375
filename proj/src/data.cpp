#include "spread/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "spread/random.hpp"

namespace spread {

namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = line.find(delim, pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t' || f.front() == '"') &&
           f.front() != delim) {
      f.remove_prefix(1);
    }
    while (!f.empty() && (f.back() == ' ' || f.back() == '\r' || f.back() == '"') && f.back() != delim) {
      f.remove_suffix(1);
    }
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::int64_t floor_to_midnight(std::int64_t t) {
  const std::int64_t d = t / kSecondsPerDay - (t % kSecondsPerDay < 0 ? 1 : 0);
  return d * kSecondsPerDay;
}

Seconds ceil_to_day(Seconds t) { return (t / kSecondsPerDay + 1) * kSecondsPerDay; }

std::vector<Trajectory> group_visits(std::vector<Visit> visits, Seconds horizon, Presence presence,
                                     std::size_t* deduplicated) {
  std::stable_sort(visits.begin(), visits.end(),
                   [](const Visit& a, const Visit& b) { return a.id < b.id; });
  std::vector<Trajectory> out;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < visits.size();) {
    std::size_t j = i;
    while (j < visits.size() && visits[j].id == visits[i].id) ++j;
    std::vector<Visit> own(visits.begin() + static_cast<std::ptrdiff_t>(i),
                           visits.begin() + static_cast<std::ptrdiff_t>(j));
    out.push_back(build_trajectory(std::move(own), horizon, presence));
    dropped += (j - i) - out.back().visits().size();
    i = j;
  }
  if (deduplicated) *deduplicated = dropped;
  return out;
}

void refresh_manifest(Dataset& d) {
  d.manifest.individuals = d.trajectories.size();
  d.manifest.visits = 0;
  for (const auto& t : d.trajectories) d.manifest.visits += t.visits().size();
}

}  // namespace

Position project(const GeoPoint& p, const GeoPoint& origin) {
  return {kMetersPerDegree * std::cos(radians(origin.lat)) * (p.lon - origin.lon),
          kMetersPerDegree * (p.lat - origin.lat)};
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = radians(b.lat - a.lat);
  const double dlon = radians(b.lon - a.lon);
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(radians(a.lat)) * std::cos(radians(b.lat)) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<NodeId> Dataset::ids() const {
  std::vector<NodeId> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) out.push_back(t.id());
  return out;
}

ColumnMap ColumnMap::generic() { return ColumnMap{}; }

ColumnMap ColumnMap::checkin() {
  ColumnMap m;
  m.delimiter = '\t';
  m.has_header = false;
  m.id = "0";
  m.time = "1";
  m.lat = "2";
  m.lon = "3";
  m.accuracy.reset();
  m.time_format = TimeFormat::kIso8601;
  return m;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() < 19) return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len, int& out) {
    auto v = parse_number<int>(text.substr(pos, len));
    if (!v) return false;
    out = *v;
    return true;
  };
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
      text[16] != ':') {
    return std::nullopt;
  }
  if (!field(0, 4, y) || !field(5, 2, mo) || !field(8, 2, d) || !field(11, 2, h) ||
      !field(14, 2, mi) || !field(17, 2, s)) {
    return std::nullopt;
  }
  const auto rest = text.substr(19);
  if (!(rest.empty() || rest == "Z")) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const auto days_since = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days_since) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

IngestResult ingest_csv(std::istream& in, const IngestOptions& options) {
  const ColumnMap& cm = options.columns;
  if (!(options.accuracy_threshold_m >= 0.0)) throw InvalidInput("accuracy threshold must be non-negative");

  IngestResult result;
  IngestStats& st = result.stats;
  std::string line;
  std::size_t line_no = 0;

  auto resolve_index = [&](const std::string& spec) -> std::size_t {
    auto v = parse_number<std::size_t>(spec);
    if (!v) throw InvalidInput("column '" + spec + "' must be a zero-based index for headerless input");
    return *v;
  };
  std::size_t c_id, c_time, c_lat, c_lon;
  std::optional<std::size_t> c_acc;
  if (cm.has_header) {
    if (!std::getline(in, line)) throw InvalidInput("input is empty; expected a header row");
    ++line_no;
    const auto header = split(line, cm.delimiter);
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
      }
      return std::nullopt;
    };
    auto require = [&](const std::string& name) {
      auto i = find(name);
      if (!i) throw InvalidInput("missing mapped column '" + name + "' in header");
      return *i;
    };
    c_id = require(cm.id);
    c_time = require(cm.time);
    c_lat = require(cm.lat);
    c_lon = require(cm.lon);
    if (cm.accuracy) c_acc = find(*cm.accuracy);
  } else {
    c_id = resolve_index(cm.id);
    c_time = resolve_index(cm.time);
    c_lat = resolve_index(cm.lat);
    c_lon = resolve_index(cm.lon);
    if (cm.accuracy) c_acc = resolve_index(*cm.accuracy);
  }

  struct Row {
    NodeId id;
    std::int64_t t;
    GeoPoint p;
  };
  std::vector<Row> rows;
  auto malformed = [&](const std::string& why) {
    ++st.rows_malformed;
    if (st.malformed_examples.size() < 10) {
      st.malformed_examples.push_back("line " + std::to_string(line_no) + ": " + why);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    ++st.rows_in;
    const auto f = split(line, cm.delimiter);
    const std::size_t need = std::max({c_id, c_time, c_lat, c_lon, c_acc.value_or(0)});
    if (f.size() <= need) {
      malformed("expected at least " + std::to_string(need + 1) + " fields");
      continue;
    }
    const auto id = parse_number<NodeId>(f[c_id]);
    const auto t = cm.time_format == TimeFormat::kIso8601 ? parse_iso8601(f[c_time])
                                                          : parse_number<std::int64_t>(f[c_time]);
    const auto lat = parse_number<double>(f[c_lat]);
    const auto lon = parse_number<double>(f[c_lon]);
    if (!id || !t || !lat || !lon || !std::isfinite(*lat) || !std::isfinite(*lon) ||
        std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) {
      malformed("unparseable id, time or coordinates");
      continue;
    }
    if (c_acc) {
      const auto acc = parse_number<double>(f[*c_acc]);
      if (!acc) {
        malformed("unparseable accuracy");
        continue;
      }
      if (*acc > options.accuracy_threshold_m) {
        ++st.rows_dropped_accuracy;
        continue;
      }
    }
    rows.push_back({*id, *t, {*lat, *lon}});
  }

  Dataset& ds = result.dataset;
  ds.manifest.dataset_id = options.dataset_id;
  if (rows.empty()) {
    ds.manifest.epoch_unix_s = options.epoch_unix_s.value_or(0);
    ds.manifest.origin = options.origin.value_or(GeoPoint{});
    return result;
  }

  std::int64_t earliest = rows.front().t;
  double sum_lat = 0.0, sum_lon = 0.0;
  for (const Row& r : rows) {
    earliest = std::min(earliest, r.t);
    sum_lat += r.p.lat;
    sum_lon += r.p.lon;
  }
  const std::int64_t epoch = options.epoch_unix_s.value_or(floor_to_midnight(earliest));
  const GeoPoint origin = options.origin.value_or(
      GeoPoint{sum_lat / static_cast<double>(rows.size()), sum_lon / static_cast<double>(rows.size())});

  std::vector<Visit> visits;
  visits.reserve(rows.size());
  Seconds last = 0;
  for (const Row& r : rows) {
    if (r.t < epoch) {
      malformed("timestamp before the dataset epoch");
      continue;
    }
    visits.push_back({r.id, r.t - epoch, project(r.p, origin)});
    last = std::max(last, r.t - epoch);
  }
  const Seconds horizon = ceil_to_day(last);
  ds.trajectories = group_visits(std::move(visits), horizon, options.presence, &st.rows_deduplicated);
  ds.manifest.epoch_unix_s = epoch;
  ds.manifest.origin = origin;
  ds.manifest.horizon_end = horizon;
  refresh_manifest(ds);
  st.rows_kept = ds.manifest.visits;
  return result;
}

IngestResult ingest_csv_file(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open input file " + path);
  return ingest_csv(in, options);
}

Seconds densest_window_start(std::span<const Trajectory> trajectories, Seconds length) {
  if (length <= 0) throw InvalidInput("window length must be positive");
  std::map<Seconds, std::size_t> per_day;
  for (const auto& tr : trajectories) {
    for (const Visit& v : tr.visits()) ++per_day[v.time / kSecondsPerDay];
  }
  if (per_day.empty()) return 0;
  const Seconds span_days = std::max<Seconds>(1, (length + kSecondsPerDay - 1) / kSecondsPerDay);
  const Seconds first = per_day.begin()->first;
  const Seconds last = per_day.rbegin()->first;
  std::vector<std::size_t> counts(static_cast<std::size_t>(last - first + 1), 0);
  for (const auto& [d, c] : per_day) counts[static_cast<std::size_t>(d - first)] = c;

  std::size_t best = 0, current = 0;
  Seconds best_start = first;
  const auto w = static_cast<std::size_t>(span_days);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    current += counts[i];
    if (i >= w) current -= counts[i - w];
    const std::size_t start = i + 1 >= w ? i + 1 - w : 0;
    if (current > best) {
      best = current;
      best_start = first + static_cast<Seconds>(start);
    }
  }
  return std::max<Seconds>(0, best_start) * kSecondsPerDay;
}

Dataset slice_window(const Dataset& dataset, Seconds start, Seconds length) {
  if (length <= 0) throw InvalidInput("window length must be positive");
  Dataset out;
  out.manifest = dataset.manifest;
  out.manifest.epoch_unix_s += start;
  out.manifest.horizon_end = length;
  for (const auto& tr : dataset.trajectories) {
    std::vector<Visit> kept;
    for (const Visit& v : tr.visits()) {
      if (v.time >= start && v.time < start + length) kept.push_back({v.id, v.time - start, v.pos});
    }
    if (kept.empty()) continue;
    const Presence presence =
        tr.presence_end() == tr.horizon_end() ? Presence::kUntilHorizon : Presence::kUntilLastVisit;
    out.trajectories.push_back(build_trajectory(std::move(kept), length, presence));
  }
  refresh_manifest(out);
  return out;
}

Dataset select_first(const Dataset& dataset, std::size_t k) {
  Dataset out;
  out.manifest = dataset.manifest;
  auto sorted = dataset.trajectories;
  std::sort(sorted.begin(), sorted.end(), [](const Trajectory& a, const Trajectory& b) { return a.id() < b.id(); });
  sorted.resize(std::min(k, sorted.size()));
  out.trajectories = std::move(sorted);
  refresh_manifest(out);
  return out;
}

Dataset select_random(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> order(dataset.trajectories.size());
  std::iota(order.begin(), order.end(), 0);
  auto gen = rng::engine(seed, rng::kSelection);
  std::shuffle(order.begin(), order.end(), gen);
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  Dataset out;
  out.manifest = dataset.manifest;
  for (std::size_t i : order) out.trajectories.push_back(dataset.trajectories[i]);
  std::sort(out.trajectories.begin(), out.trajectories.end(),
            [](const Trajectory& a, const Trajectory& b) { return a.id() < b.id(); });
  refresh_manifest(out);
  return out;
}

void SyntheticConfig::validate() const {
  if (individuals == 0) throw InvalidInput("synthetic individuals must be positive");
  if (horizon_days <= 0) throw InvalidInput("synthetic horizon_days must be positive");
  if (venues == 0) throw InvalidInput("synthetic venues must be positive");
  if (!(home_spread_m > 0.0)) throw InvalidInput("synthetic home_spread_m must be positive");
  if (!(daily_visit_rate >= 0.0)) throw InvalidInput("synthetic daily_visit_rate must be non-negative");
  if (!(dwell_mean_s > 0.0)) throw InvalidInput("synthetic dwell_mean_s must be positive");
  if (!(intensity > 0.0)) throw InvalidInput("synthetic intensity must be positive");
  if (!(venue_footprint_m > 0.0)) throw InvalidInput("synthetic venue_footprint_m must be positive");
  if (!(hotspot_skew >= 0.0)) throw InvalidInput("synthetic hotspot_skew must be non-negative");
}

Dataset generate_synthetic(const SyntheticConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const Seconds horizon = static_cast<Seconds>(cfg.horizon_days) * kSecondsPerDay;

  auto venue_gen = rng::engine(seed, rng::kSynthetic);
  std::uniform_real_distribution<double> coord(0.0, cfg.home_spread_m);
  std::vector<Position> venues(cfg.venues);
  std::vector<double> weight(cfg.venues);
  for (std::size_t v = 0; v < cfg.venues; ++v) {
    venues[v] = {coord(venue_gen), coord(venue_gen)};
    weight[v] = 1.0 / std::pow(static_cast<double>(v + 1), cfg.hotspot_skew);
  }

  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.individuals))));
  const double spacing = cfg.home_spread_m / static_cast<double>(side);
  const double radius = cfg.venue_footprint_m / std::sqrt(cfg.intensity);

  Dataset ds;
  ds.manifest.dataset_id = "synthetic-" + std::to_string(seed);
  ds.manifest.horizon_end = horizon;
  ds.trajectories.reserve(cfg.individuals);
  for (std::size_t i = 0; i < cfg.individuals; ++i) {
    const auto id = static_cast<NodeId>(i);
    std::mt19937_64 gen(rng::derive(seed, rng::kSynthetic, i + 1));
    std::uniform_real_distribution<double> jitter(-spacing / 4, spacing / 4);
    const Position home{(static_cast<double>(i % side) + 0.5) * spacing + jitter(gen),
                        (static_cast<double>(i / side) + 0.5) * spacing + jitter(gen)};
    std::poisson_distribution<int> trips(cfg.daily_visit_rate);
    std::exponential_distribution<double> dwell(1.0 / cfg.dwell_mean_s);
    std::uniform_real_distribution<double> hour(8.0 * 3600, 22.0 * 3600);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());

    std::vector<Visit> visits{{id, 0, home}};
    for (int day = 0; day < cfg.horizon_days; ++day) {
      const Seconds base = static_cast<Seconds>(day) * kSecondsPerDay;
      const int k = cfg.daily_visit_rate > 0.0 ? trips(gen) : 0;
      std::vector<Seconds> starts(static_cast<std::size_t>(k));
      for (auto& s : starts) s = base + static_cast<Seconds>(hour(gen));
      std::sort(starts.begin(), starts.end());
      Seconds free_at = base;
      for (Seconds s : starts) {
        const Seconds arrive = std::max(s, free_at + 1);
        const Seconds leave =
            std::min(arrive + 1 + static_cast<Seconds>(dwell(gen)), base + kSecondsPerDay - 1);
        if (arrive >= leave) break;
        const Position& at = venues[pick(gen)];
        const double r = radius * std::sqrt(unit(gen));
        const double a = 2.0 * std::numbers::pi * unit(gen);
        visits.push_back({id, arrive, {at.x + r * std::cos(a), at.y + r * std::sin(a)}});
        visits.push_back({id, leave, home});
        free_at = leave;
      }
    }
    ds.trajectories.push_back(build_trajectory(std::move(visits), horizon));
  }
  refresh_manifest(ds);
  return ds;
}

double average_daily_colocations(std::size_t contacts, std::size_t individuals, Seconds horizon) {
  if (individuals == 0 || horizon <= 0) return 0.0;
  const double days_span = static_cast<double>(horizon) / kSecondsPerDay;
  // Each contact involves two people.
  return 2.0 * static_cast<double>(contacts) / (static_cast<double>(individuals) * days_span);
}

void write_visits_csv(std::ostream& out, const Dataset& dataset) {
  out << "id,t_s,x_m,y_m\n";
  out.precision(17);
  for (const auto& tr : dataset.trajectories) {
    for (const Visit& v : tr.visits()) out << v.id << ',' << v.time << ',' << v.pos.x << ',' << v.pos.y << '\n';
  }
}

void write_manifest_json(std::ostream& out, const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["dataset_id"] = m.dataset_id;
  j["epoch_unix_s"] = m.epoch_unix_s;
  j["origin_lat"] = m.origin.lat;
  j["origin_lon"] = m.origin.lon;
  j["horizon_end_s"] = m.horizon_end;
  j["individuals"] = m.individuals;
  j["visits"] = m.visits;
  out << j.dump(2) << '\n';
}

DatasetManifest read_manifest_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("manifest is not valid JSON: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.epoch_unix_s = j.at("epoch_unix_s").get<std::int64_t>();
    m.origin = {j.at("origin_lat").get<double>(), j.at("origin_lon").get<double>()};
    m.horizon_end = j.at("horizon_end_s").get<Seconds>();
    m.individuals = j.at("individuals").get<std::size_t>();
    m.visits = j.at("visits").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("manifest is incomplete: ") + e.what());
  }
  if (m.horizon_end <= 0) throw InvalidInput("manifest horizon_end_s must be positive");
  return m;
}

Dataset read_visits_csv(std::istream& in, const DatasetManifest& manifest, Presence presence) {
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != std::vector<std::string_view>{"id", "t_s", "x_m", "y_m"}) {
    throw InvalidInput("visit dump must start with header id,t_s,x_m,y_m");
  }
  std::vector<Visit> visits;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    std::optional<NodeId> id;
    std::optional<Seconds> t;
    std::optional<double> x, y;
    if (f.size() == 4) {
      id = parse_number<NodeId>(f[0]);
      t = parse_number<Seconds>(f[1]);
      x = parse_number<double>(f[2]);
      y = parse_number<double>(f[3]);
    }
    if (!id || !t || !x || !y) throw InvalidInput("malformed visit on line " + std::to_string(line_no));
    visits.push_back({*id, *t, {*x, *y}});
  }
  Dataset ds;
  ds.manifest = manifest;
  ds.trajectories = group_visits(std::move(visits), manifest.horizon_end, presence, nullptr);
  refresh_manifest(ds);
  if (ds.manifest.individuals != manifest.individuals || ds.manifest.visits != manifest.visits) {
    throw InvalidInput("visit dump does not match its manifest counts");
  }
  return ds;
}

void save_dataset(const std::string& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  std::ofstream visits(std::filesystem::path(dir) / "visits.csv");
  write_visits_csv(visits, dataset);
  std::ofstream manifest(std::filesystem::path(dir) / "manifest.json");
  write_manifest_json(manifest, dataset.manifest);
  if (!visits || !manifest) throw std::runtime_error("failed writing dataset to " + dir);
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream manifest_in(std::filesystem::path(dir) / "manifest.json");
  if (!manifest_in) throw InvalidInput("no manifest.json in " + dir);
  const auto manifest = read_manifest_json(manifest_in);
  std::ifstream visits_in(std::filesystem::path(dir) / "visits.csv");
  if (!visits_in) throw InvalidInput("no visits.csv in " + dir);
  return read_visits_csv(visits_in, manifest);
}

}  // namespace spread
