#include "spread/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spread/random.hpp"

namespace spread {

using json = nlohmann::json;

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& message)
    : InvalidInput(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                            : source + ": " + message),
      line_(line) {}

DiffusionParams profile_defaults(const std::string& profile) {
  DiffusionParams p;
  if (profile == "default") return p;
  if (profile == "gowalla") {
    p.d_max = 110.0;
    p.p_inf = 0.1;
    return p;
  }
  throw InvalidInput("unknown profile '" + profile + "' (expected default or gowalla)");
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Reads a parsed config while remembering where each key sits in the text.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
    throw ConfigError(source_, line_of(path), message);
  }

  std::size_t line_of(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& key : path) {
      const auto at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      pos = at + 1;
      found = true;
    }
    return found ? line_of_offset(text_, pos) : 0;
  }

  static std::string dotted(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& k : path) out += (out.empty() ? "" : ".") + k;
    return out;
  }

  void only_keys(const json& obj, const std::vector<std::string>& path,
                 const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "'" + dotted(path) + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) {
        auto p = path;
        p.push_back(k);
        fail(p, "unknown key '" + dotted(p) + "'");
      }
    }
  }

  double number(const json& obj, std::vector<std::string> path, double fallback) const {
    const std::string key = path.back();
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path, "'" + dotted(path) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "'" + dotted(path) + "' must be finite");
    return x;
  }

  std::int64_t integer(const json& obj, std::vector<std::string> path, std::int64_t fallback) const {
    const std::string key = path.back();
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path, "'" + dotted(path) + "' must be an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const json& obj, std::vector<std::string> path, const std::string& fallback) const {
    const std::string key = path.back();
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path, "'" + dotted(path) + "' must be a string");
    return v.get<std::string>();
  }

  /// Reads a duration given under exactly one of `<base>_<unit>` keys.
  Seconds duration(const json& obj, const std::vector<std::string>& parent, const std::string& base,
                   Seconds fallback) const {
    static const std::pair<const char*, double> units[] = {{"_days", 86400.0}, {"_s", 1.0}, {"_min", 60.0}};
    std::optional<Seconds> out;
    for (const auto& [suffix, scale] : units) {
      auto p = parent;
      p.push_back(base + suffix);
      if (!obj.contains(p.back())) continue;
      if (out) fail(p, "'" + base + "' is given more than once with different units");
      const double v = number(obj, p, 0.0);
      out = static_cast<Seconds>(std::llround(v * scale));
    }
    return out.value_or(fallback);
  }

 private:
  const std::string& text_;
  std::string source_;
};

SourceKind parse_source(const std::string& s) {
  if (s == "synthetic") return SourceKind::kSynthetic;
  if (s == "checkin") return SourceKind::kCheckin;
  if (s == "csv") return SourceKind::kGenericCsv;
  if (s == "dump") return SourceKind::kDump;
  throw InvalidInput("unknown dataset source '" + s + "' (expected synthetic, checkin, csv, dump)");
}

std::string source_name(SourceKind k) {
  switch (k) {
    case SourceKind::kSynthetic: return "synthetic";
    case SourceKind::kCheckin: return "checkin";
    case SourceKind::kGenericCsv: return "csv";
    case SourceKind::kDump: return "dump";
  }
  return "synthetic";
}

std::string selection_name(Selection s) {
  switch (s) {
    case Selection::kAll: return "all";
    case Selection::kFirst: return "first";
    case Selection::kRandom: return "random";
  }
  return "all";
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                      std::string("invalid JSON: ") + e.what());
  }
  Reader r(text, source);
  r.only_keys(root, {}, {"profile", "seed", "threads", "output_dir", "dataset", "diffusion", "experiment"});

  RunConfig cfg;
  cfg.profile = r.string(root, {"profile"}, "default");
  DiffusionParams params;
  try {
    params = profile_defaults(cfg.profile);
  } catch (const InvalidInput& e) {
    r.fail({"profile"}, e.what());
  }
  const auto seed = r.integer(root, {"seed"}, 1);
  if (seed < 0) r.fail({"seed"}, "'seed' must be non-negative");
  cfg.experiment.master_seed = static_cast<std::uint64_t>(seed);
  const auto threads = r.integer(root, {"threads"}, 0);
  if (threads < 0) r.fail({"threads"}, "'threads' must be non-negative");
  cfg.threads = static_cast<unsigned>(threads);
  cfg.output_dir = r.string(root, {"output_dir"}, cfg.output_dir);

  if (root.contains("dataset")) {
    const json& d = root.at("dataset");
    r.only_keys(d, {"dataset"},
                {"source", "path", "accuracy_threshold_m", "window_days", "select", "select_k", "synthetic"});
    DatasetSource& src = cfg.dataset;
    try {
      src.kind = parse_source(r.string(d, {"dataset", "source"}, "synthetic"));
    } catch (const InvalidInput& e) {
      r.fail({"dataset", "source"}, e.what());
    }
    src.path = r.string(d, {"dataset", "path"}, "");
    if (src.kind != SourceKind::kSynthetic && src.path.empty()) {
      r.fail({"dataset", "source"}, "dataset source '" + source_name(src.kind) + "' needs 'dataset.path'");
    }
    src.accuracy_threshold_m = r.number(d, {"dataset", "accuracy_threshold_m"}, src.accuracy_threshold_m);
    if (src.accuracy_threshold_m < 0) r.fail({"dataset", "accuracy_threshold_m"}, "'dataset.accuracy_threshold_m' must be non-negative");
    if (d.contains("window_days")) {
      const auto w = r.integer(d, {"dataset", "window_days"}, 0);
      if (w <= 0) r.fail({"dataset", "window_days"}, "'dataset.window_days' must be positive");
      src.window_days = static_cast<int>(w);
    }
    const auto sel = r.string(d, {"dataset", "select"}, "all");
    if (sel == "all") {
      src.selection = Selection::kAll;
    } else if (sel == "first") {
      src.selection = Selection::kFirst;
    } else if (sel == "random") {
      src.selection = Selection::kRandom;
    } else {
      r.fail({"dataset", "select"}, "'dataset.select' must be all, first or random");
    }
    const auto k = r.integer(d, {"dataset", "select_k"}, 0);
    if (src.selection != Selection::kAll && k <= 0) {
      r.fail({"dataset", "select"}, "'dataset.select' = " + sel + " needs a positive 'dataset.select_k'");
    }
    src.select_k = static_cast<std::size_t>(std::max<std::int64_t>(0, k));

    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      const std::vector<std::string> base{"dataset", "synthetic"};
      r.only_keys(s, base,
                  {"individuals", "horizon_days", "venues", "home_spread_m", "daily_visit_rate",
                   "dwell_mean_s", "intensity", "venue_footprint_m", "hotspot_skew", "seed"});
      auto at = [&](const char* key) {
        auto p = base;
        p.push_back(key);
        return p;
      };
      SyntheticConfig& sc = src.synthetic;
      const auto n = r.integer(s, at("individuals"), static_cast<std::int64_t>(sc.individuals));
      if (n <= 0) r.fail(at("individuals"), "'dataset.synthetic.individuals' must be positive");
      sc.individuals = static_cast<std::size_t>(n);
      const auto h = r.integer(s, at("horizon_days"), sc.horizon_days);
      if (h <= 0) r.fail(at("horizon_days"), "'dataset.synthetic.horizon_days' must be positive");
      sc.horizon_days = static_cast<int>(h);
      const auto v = r.integer(s, at("venues"), static_cast<std::int64_t>(sc.venues));
      if (v <= 0) r.fail(at("venues"), "'dataset.synthetic.venues' must be positive");
      sc.venues = static_cast<std::size_t>(v);
      sc.home_spread_m = r.number(s, at("home_spread_m"), sc.home_spread_m);
      sc.daily_visit_rate = r.number(s, at("daily_visit_rate"), sc.daily_visit_rate);
      sc.dwell_mean_s = r.number(s, at("dwell_mean_s"), sc.dwell_mean_s);
      sc.intensity = r.number(s, at("intensity"), sc.intensity);
      sc.venue_footprint_m = r.number(s, at("venue_footprint_m"), sc.venue_footprint_m);
      sc.hotspot_skew = r.number(s, at("hotspot_skew"), sc.hotspot_skew);
      if (s.contains("seed")) {
        const auto ss = r.integer(s, at("seed"), 0);
        if (ss < 0) r.fail(at("seed"), "'dataset.synthetic.seed' must be non-negative");
        src.synthetic_seed = static_cast<std::uint64_t>(ss);
      }
      try {
        sc.validate();
      } catch (const InvalidInput& e) {
        r.fail(base, e.what());
      }
    }
  }

  if (root.contains("diffusion")) {
    const json& d = root.at("diffusion");
    const std::vector<std::string> base{"diffusion"};
    r.only_keys(d, base,
                {"mu_is_days", "mu_is_s", "mu_is_min", "mu_r_days", "mu_r_s", "mu_r_min", "p_inf",
                 "p_init", "d_max_m", "t_min_s", "t_min_min", "t_min_days"});
    params.mu_is = r.duration(d, base, "mu_is", params.mu_is);
    params.mu_r = r.duration(d, base, "mu_r", params.mu_r);
    params.t_min = r.duration(d, base, "t_min", params.t_min);
    params.p_inf = r.number(d, {"diffusion", "p_inf"}, params.p_inf);
    params.p_init = r.number(d, {"diffusion", "p_init"}, params.p_init);
    params.d_max = r.number(d, {"diffusion", "d_max_m"}, params.d_max);
    auto check = [&](bool ok, const std::string& key, const std::string& message) {
      if (ok) return;
      std::vector<std::string> p{"diffusion"};
      for (const char* suffix : {"", "_days", "_s", "_min", "_m"}) {
        if (d.contains(key + suffix)) {
          p.push_back(key + suffix);
          break;
        }
      }
      r.fail(p, message);
    };
    check(params.mu_is > 0, "mu_is", "mu_IS must be positive");
    check(params.mu_r > params.mu_is, "mu_r", "mu_R must exceed mu_IS");
    check(params.p_inf >= 0 && params.p_inf <= 1, "p_inf", "'diffusion.p_inf' must lie in [0, 1]");
    check(params.p_init >= 0 && params.p_init <= 1, "p_init", "'diffusion.p_init' must lie in [0, 1]");
    check(params.d_max > 0, "d_max", "'diffusion.d_max_m' must be positive");
    check(params.t_min >= 0, "t_min", "t_min must be non-negative");
  }
  cfg.experiment.params = params;

  if (root.contains("experiment")) {
    const json& e = root.at("experiment");
    const std::vector<std::string> base{"experiment"};
    r.only_keys(e, base,
                {"p_s", "draws", "ground_truth_runs", "scale_runs", "methods", "population",
                 "density_cells", "pollsus_prune_below"});
    ExperimentConfig& x = cfg.experiment;
    if (e.contains("p_s")) {
      const json& ps = e.at("p_s");
      std::vector<double> values;
      if (ps.is_number()) {
        values.push_back(ps.get<double>());
      } else if (ps.is_array()) {
        for (const auto& v : ps) {
          if (!v.is_number()) r.fail({"experiment", "p_s"}, "'experiment.p_s' entries must be numbers");
          values.push_back(v.get<double>());
        }
      } else {
        r.fail({"experiment", "p_s"}, "'experiment.p_s' must be a number or a list of numbers");
      }
      if (values.empty()) r.fail({"experiment", "p_s"}, "'experiment.p_s' must not be empty");
      for (double p : values) {
        if (!(p > 0.0 && p <= 1.0)) {
          r.fail({"experiment", "p_s"}, "'experiment.p_s' values must lie in (0, 1] (got " + format_double(p) + ")");
        }
      }
      x.p_s_values = values;
    }
    auto positive = [&](const char* key, int fallback) {
      const auto v = r.integer(e, {"experiment", key}, fallback);
      if (v < 1) r.fail({"experiment", key}, std::string("'experiment.") + key + "' must be at least 1");
      return static_cast<int>(v);
    };
    x.draws = positive("draws", x.draws);
    x.ground_truth_runs = positive("ground_truth_runs", x.ground_truth_runs);
    x.scale_runs = positive("scale_runs", x.scale_runs);
    x.density_cells = positive("density_cells", x.density_cells);
    if (e.contains("methods")) {
      const json& ms = e.at("methods");
      if (!ms.is_array() || ms.empty()) r.fail({"experiment", "methods"}, "'experiment.methods' must be a non-empty list");
      x.methods.clear();
      for (const auto& m : ms) {
        if (!m.is_string()) r.fail({"experiment", "methods"}, "'experiment.methods' entries must be strings");
        const auto name = m.get<std::string>();
        std::vector<Method> add;
        if (name == "pollsusceptible") {
          add = {Method::kPollSusLower, Method::kPollSusUpper};
        } else {
          try {
            add = {parse_method(name)};
          } catch (const InvalidInput& err) {
            r.fail({"experiment", "methods"}, err.what());
          }
        }
        for (Method a : add) {
          if (std::find(x.methods.begin(), x.methods.end(), a) == x.methods.end()) x.methods.push_back(a);
        }
      }
    }
    if (e.contains("population") && !e.at("population").is_null()) {
      const auto n = r.integer(e, {"experiment", "population"}, 0);
      if (n < 1) r.fail({"experiment", "population"}, "'experiment.population' must be positive");
      x.population = static_cast<std::size_t>(n);
    }
    x.pollsus.prune_below = r.number(e, {"experiment", "pollsus_prune_below"}, 0.0);
    if (!(x.pollsus.prune_below >= 0.0 && x.pollsus.prune_below < 1.0)) {
      r.fail({"experiment", "pollsus_prune_below"}, "'experiment.pollsus_prune_below' must lie in [0, 1)");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

nlohmann::ordered_json resolved_config(const RunConfig& c) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["profile"] = c.profile;
  j["seed"] = c.experiment.master_seed;
  oj d;
  d["source"] = source_name(c.dataset.kind);
  if (c.dataset.kind != SourceKind::kSynthetic) d["path"] = c.dataset.path;
  d["accuracy_threshold_m"] = c.dataset.accuracy_threshold_m;
  if (c.dataset.window_days) d["window_days"] = *c.dataset.window_days;
  d["select"] = selection_name(c.dataset.selection);
  if (c.dataset.selection != Selection::kAll) d["select_k"] = c.dataset.select_k;
  if (c.dataset.kind == SourceKind::kSynthetic) {
    const auto& s = c.dataset.synthetic;
    oj sj;
    sj["individuals"] = s.individuals;
    sj["horizon_days"] = s.horizon_days;
    sj["venues"] = s.venues;
    sj["home_spread_m"] = s.home_spread_m;
    sj["daily_visit_rate"] = s.daily_visit_rate;
    sj["dwell_mean_s"] = s.dwell_mean_s;
    sj["intensity"] = s.intensity;
    sj["venue_footprint_m"] = s.venue_footprint_m;
    sj["hotspot_skew"] = s.hotspot_skew;
    sj["seed"] = c.dataset.synthetic_seed.value_or(c.experiment.master_seed);
    d["synthetic"] = sj;
  }
  j["dataset"] = d;
  const auto& p = c.experiment.params;
  j["diffusion"] = {{"mu_is_s", p.mu_is}, {"mu_r_s", p.mu_r}, {"p_inf", p.p_inf},
                    {"p_init", p.p_init}, {"d_max_m", p.d_max}, {"t_min_s", p.t_min}};
  const auto& x = c.experiment;
  oj e;
  e["p_s"] = x.p_s_values;
  e["draws"] = x.draws;
  e["ground_truth_runs"] = x.ground_truth_runs;
  e["scale_runs"] = x.scale_runs;
  auto methods = oj::array();
  for (Method m : x.methods) methods.push_back(std::string(method_name(m)));
  e["methods"] = methods;
  e["population"] = x.population ? oj(*x.population) : oj(nullptr);
  e["density_cells"] = x.density_cells;
  e["pollsus_prune_below"] = x.pollsus.prune_below;
  j["experiment"] = e;
  return j;
}

Dataset load_source(const DatasetSource& src, std::uint64_t master_seed, IngestStats* stats) {
  Dataset ds;
  switch (src.kind) {
    case SourceKind::kSynthetic:
      ds = generate_synthetic(src.synthetic, src.synthetic_seed.value_or(master_seed));
      break;
    case SourceKind::kCheckin:
    case SourceKind::kGenericCsv: {
      IngestOptions opt;
      opt.columns = src.kind == SourceKind::kCheckin ? ColumnMap::checkin() : ColumnMap::generic();
      opt.accuracy_threshold_m = src.accuracy_threshold_m;
      opt.dataset_id = src.path;
      auto result = ingest_csv_file(src.path, opt);
      if (stats) *stats = result.stats;
      ds = std::move(result.dataset);
      break;
    }
    case SourceKind::kDump:
      ds = load_dataset(src.path);
      break;
  }
  if (src.window_days) {
    const Seconds length = static_cast<Seconds>(*src.window_days) * kSecondsPerDay;
    ds = slice_window(ds, densest_window_start(ds.trajectories, length), length);
  }
  if (src.selection == Selection::kFirst) ds = select_first(ds, src.select_k);
  if (src.selection == Selection::kRandom) {
    ds = select_random(ds, src.select_k, rng::derive(master_seed, rng::kSelection));
  }
  if (ds.trajectories.empty()) throw InvalidInput("dataset has no individuals after filtering");
  return ds;
}

}  // namespace spread
