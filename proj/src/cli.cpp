#include "spread/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "spread/config.hpp"
#include "spread/contact_network.hpp"
#include "spread/parallel.hpp"
#include "spread/random.hpp"

namespace spread {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON run configuration");
  cmd->add_option("--out", c.out_dir, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", c.seed, "Master seed (overrides seed)");
  cmd->add_option("--threads", c.threads, "Worker thread cap (0 = all cores)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? parse_config("{}") : load_config(c.config_path);
  if (c.seed) cfg.experiment.master_seed = *c.seed;
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  if (c.threads > 0) cfg.threads = c.threads;
  set_thread_limit(cfg.threads);
  return cfg;
}

void write_json(const fs::path& path, const ojson& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void warn_infeasible(std::ostream& err, double p_s, double p_min) {
  err << "warning: PollSusceptible upper bound is not guaranteed at p_s=" << format_double(p_s)
      << " with p_min=" << format_double(p_min) << " (the bound needs p_s >= "
      << fixed(std::sqrt(-std::log(p_min) / 2.0), 4) << ")\n";
}

int cmd_exponents(double p_s, double p_min, int digits, std::ostream& out) {
  const auto e = compute_exponents(p_s, p_min);
  out << "c_l=" << fixed(e.c_l, digits) << '\n';
  out << "c_u=" << (e.c_u ? fixed(*e.c_u, digits) : std::string("none")) << '\n';
  out << "feasible=" << (e.feasible ? "true" : "false") << '\n';
  return 0;
}

int cmd_synth(const Common& common, std::ostream& out) {
  RunConfig cfg = resolve(common);
  cfg.dataset.kind = SourceKind::kSynthetic;
  const Dataset ds = load_source(cfg.dataset, cfg.experiment.master_seed);
  save_dataset(cfg.output_dir, ds);
  const auto contacts = detect_contacts(ds.trajectories, cfg.experiment.params.d_max,
                                        cfg.experiment.params.t_min);
  const double daily = average_daily_colocations(contacts.size(), ds.trajectories.size(),
                                                 ds.manifest.horizon_end);
  ojson stats;
  stats["config"] = resolved_config(cfg);
  stats["individuals"] = ds.manifest.individuals;
  stats["visits"] = ds.manifest.visits;
  stats["contacts"] = contacts.size();
  stats["average_daily_colocations"] = daily;
  write_json(fs::path(cfg.output_dir) / "synth_stats.json", stats);
  out << "individuals=" << ds.manifest.individuals << " visits=" << ds.manifest.visits
      << " contacts=" << contacts.size() << " average_daily_colocations=" << fixed(daily, 3) << '\n';
  return 0;
}

int cmd_ingest(const Common& common, const std::string& input, const std::string& format,
               std::ostream& out) {
  RunConfig cfg = resolve(common);
  if (!input.empty()) {
    cfg.dataset.path = input;
    cfg.dataset.kind = format == "csv" ? SourceKind::kGenericCsv : SourceKind::kCheckin;
  }
  if (cfg.dataset.kind != SourceKind::kCheckin && cfg.dataset.kind != SourceKind::kGenericCsv) {
    throw InvalidInput("ingest needs --input or a config with dataset.source checkin or csv");
  }
  IngestStats stats;
  const Dataset ds = load_source(cfg.dataset, cfg.experiment.master_seed, &stats);
  save_dataset(cfg.output_dir, ds);
  ojson j;
  j["config"] = resolved_config(cfg);
  j["rows_in"] = stats.rows_in;
  j["rows_kept"] = stats.rows_kept;
  j["rows_dropped_accuracy"] = stats.rows_dropped_accuracy;
  j["rows_malformed"] = stats.rows_malformed;
  j["rows_deduplicated"] = stats.rows_deduplicated;
  j["malformed_examples"] = stats.malformed_examples;
  j["individuals"] = ds.manifest.individuals;
  j["visits"] = ds.manifest.visits;
  write_json(fs::path(cfg.output_dir) / "ingest_stats.json", j);
  out << "rows_in=" << stats.rows_in << " kept=" << stats.rows_kept
      << " dropped_accuracy=" << stats.rows_dropped_accuracy << " malformed=" << stats.rows_malformed
      << " deduplicated=" << stats.rows_deduplicated << " individuals=" << ds.manifest.individuals
      << '\n';
  return 0;
}

int cmd_simulate(const Common& common, bool per_run, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  const Dataset ds = load_source(cfg.dataset, cfg.experiment.master_seed);
  const auto& params = cfg.experiment.params;
  const auto contacts = detect_contacts(ds.trajectories, params.d_max, params.t_min);
  const auto times = evaluation_grid(ds.manifest.horizon_end);
  const auto gt = ground_truth(contacts, ds.ids(), params, cfg.experiment.ground_truth_runs,
                               rng::derive(cfg.experiment.master_seed, rng::kRun), times);
  fs::create_directories(cfg.output_dir);
  {
    std::ofstream csv(fs::path(cfg.output_dir) / "simulation.csv");
    csv << "day,count,std\n";
    for (std::size_t j = 0; j < times.size(); ++j) {
      csv << format_double(static_cast<double>(times[j]) / kSecondsPerDay) << ','
          << format_double(gt.mean[j]) << ',' << format_double(gt.stddev[j]) << '\n';
    }
  }
  ojson j;
  j["config"] = resolved_config(cfg);
  j["contacts"] = contacts.size();
  j["individuals"] = ds.manifest.individuals;
  if (per_run) j["runs"] = gt.runs;
  write_json(fs::path(cfg.output_dir) / "simulation.json", j);
  write_json(fs::path(cfg.output_dir) / "resolved_config.json", resolved_config(cfg));
  out << "contacts=" << contacts.size() << " final_mean=" << fixed(gt.mean.back(), 3) << '\n';
  return 0;
}

int cmd_estimate(const Common& common, const std::string& method, std::optional<double> p_s_flag,
                 int draw, bool input_is_sample, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(common);
  const auto& x = cfg.experiment;
  const double p_s = p_s_flag.value_or(x.p_s_values.front());
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidInput("--p_s must lie in (0, 1]");
  if (draw < 0) throw InvalidInput("--draw must be non-negative");
  std::vector<Method> methods;
  if (method == "all") {
    methods = {Method::kScale, Method::kDensity, Method::kPollSpreader, Method::kPollSusLower,
               Method::kPollSusUpper};
  } else if (method == "pollsusceptible") {
    methods = {Method::kPollSusLower, Method::kPollSusUpper};
  } else {
    methods = {parse_method(method)};
  }

  const Dataset ds = load_source(cfg.dataset, x.master_seed);
  const auto ids = ds.ids();
  SampleSet sample;
  std::size_t population = 0;
  const std::uint64_t sample_seed = rng::derive(x.master_seed, rng::kDraw, 0, static_cast<std::uint64_t>(draw));
  if (input_is_sample) {
    sample.ids = ids;
    sample.p_s = p_s;
    population = x.population.value_or(static_cast<std::size_t>(std::llround(static_cast<double>(ids.size()) / p_s)));
  } else {
    sample = draw_sample(ids, p_s, sample_seed);
    population = x.population.value_or(ids.size());
  }
  if (sample.ids.empty()) throw InvalidInput("the sub-sample is empty; raise p_s or change the seed");
  if (population < sample.ids.size()) throw InvalidInput("population is smaller than the sub-sample");

  const auto& params = x.params;
  const auto contacts = detect_contacts(ds.trajectories, params.d_max, params.t_min);
  std::vector<bool> keep(ids.empty() ? 0 : static_cast<std::size_t>(ids.back()) + 1, false);
  for (NodeId u : sample.ids) keep[u] = true;
  const auto sample_contacts = restrict_contacts(contacts, keep);
  std::vector<Trajectory> sample_trajs;
  for (const auto& tr : ds.trajectories) {
    if (keep[tr.id()]) sample_trajs.push_back(tr);
  }
  const auto times = evaluation_grid(ds.manifest.horizon_end);
  const auto net = ContactNetwork::build(sample_contacts, sample.ids, population);

  std::vector<EstimateSeries> series;
  std::optional<PollSusSeries> pollsus;
  for (Method m : methods) {
    switch (m) {
      case Method::kScale:
        series.push_back(scale_estimate(sample_contacts, sample.ids, params, p_s, x.scale_runs,
                                        rng::derive(x.master_seed, rng::kScale, 0, static_cast<std::uint64_t>(draw)), times));
        break;
      case Method::kDensity:
        series.push_back(density_estimate(sample_trajs, params, p_s, population, times, x.density_cells));
        break;
      case Method::kPollSpreader:
        series.push_back(pollspreader_estimate(net, params, p_s, times));
        break;
      case Method::kPollSusLower:
      case Method::kPollSusUpper:
        if (!pollsus) {
          pollsus = pollsusceptible_estimate(net, params, p_s, times, x.pollsus);
          if (!pollsus->upper.feasible) warn_infeasible(err, p_s, *pollsus->upper.p_min);
        }
        series.push_back(m == Method::kPollSusLower ? pollsus->lower : pollsus->upper);
        break;
    }
    series.back().seed = input_is_sample ? 0 : sample_seed;
  }

  fs::create_directories(cfg.output_dir);
  {
    std::ofstream csv(fs::path(cfg.output_dir) / "estimate.csv");
    csv << "day,value,method,feasible\n";
    for (const auto& s : series) {
      for (std::size_t j = 0; j < s.times.size(); ++j) {
        csv << format_double(static_cast<double>(s.times[j]) / kSecondsPerDay) << ','
            << format_double(s.values[j]) << ',' << method_name(s.method) << ','
            << (s.feasible ? "true" : "false") << '\n';
      }
    }
  }
  ojson j;
  j["config"] = resolved_config(cfg);
  j["p_s"] = p_s;
  j["draw"] = draw;
  j["input_is_sample"] = input_is_sample;
  j["population"] = population;
  j["sample_size"] = sample.ids.size();
  auto arr = ojson::array();
  for (const auto& s : series) {
    ojson e;
    e["method"] = std::string(method_name(s.method));
    e["p_s"] = s.p_s;
    e["seed"] = s.seed;
    e["feasible"] = s.feasible;
    e["p_min"] = s.p_min ? ojson(*s.p_min) : ojson(nullptr);
    e["c_l"] = s.c_l ? ojson(*s.c_l) : ojson(nullptr);
    e["c_u"] = s.c_u ? ojson(*s.c_u) : ojson(nullptr);
    e["values"] = s.values;
    arr.push_back(std::move(e));
  }
  j["series"] = arr;
  write_json(fs::path(cfg.output_dir) / "estimate.json", j);
  write_json(fs::path(cfg.output_dir) / "resolved_config.json", resolved_config(cfg));
  for (const auto& s : series) {
    out << method_name(s.method) << " final=" << fixed(s.values.back(), 3)
        << (s.feasible ? "" : " (not a guaranteed bound)") << '\n';
  }
  return 0;
}

int cmd_evaluate(const Common& common, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(common);
  const Dataset ds = load_source(cfg.dataset, cfg.experiment.master_seed);
  const auto& params = cfg.experiment.params;
  const auto contacts = detect_contacts(ds.trajectories, params.d_max, params.t_min);
  const auto report = run_experiment(ds, contacts, cfg.experiment);
  write_report(cfg.output_dir, report, resolved_config(cfg));

  std::map<double, double> infeasible;  // p_s -> smallest p_min among flagged draws
  for (const DrawResult& r : report.draws) {
    if (r.series && r.method == Method::kPollSusUpper && !r.series->feasible && r.series->p_min) {
      auto [it, fresh] = infeasible.emplace(r.p_s, *r.series->p_min);
      if (!fresh) it->second = std::min(it->second, *r.series->p_min);
    }
    if (!r.series) {
      err << "warning: " << method_name(r.method) << " failed on draw " << r.draw << " at p_s="
          << format_double(r.p_s) << ": " << r.error << '\n';
    }
  }
  for (const auto& [p_s, p_min] : infeasible) warn_infeasible(err, p_s, p_min);
  out << "population=" << report.population << " contacts=" << report.contacts
      << " average_daily_colocations=" << fixed(report.daily_colocations, 3) << '\n';
  for (const MethodSummary& s : report.summary) {
    double total = 0.0;
    std::size_t count = 0;
    for (double v : s.mae) {
      if (std::isfinite(v)) {
        total += v;
        ++count;
      }
    }
    out << method_name(s.method) << " p_s=" << format_double(s.p_s) << " mean_mae="
        << (count ? fixed(total / static_cast<double>(count), 3) : std::string("nan")) << '\n';
  }
  out << "report written to " << cfg.output_dir << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimate the spread of a contact-borne phenomenon from sub-sampled mobility data"};
  app.require_subcommand(1);

  Common common;
  double exp_p_s = 0.0, exp_p_min = 1.0;
  int digits = 4;
  auto* exponents = app.add_subcommand("exponents", "Print the bound exponents for (p_s, p_min)");
  exponents->add_option("--p_s", exp_p_s, "Sampling probability")->required();
  exponents->add_option("--p_min", exp_p_min, "Lower bound on per-pair non-transmission probability")->required();
  exponents->add_option("--digits", digits, "Decimal places")->check(CLI::Range(0, 17));

  auto* synth = app.add_subcommand("synth", "Generate a synthetic mobility dataset");
  add_common(synth, common);

  std::string input, format = "checkin";
  auto* ingest = app.add_subcommand("ingest", "Ingest check-in or generic CSV visit data");
  add_common(ingest, common);
  ingest->add_option("--input", input, "Input file");
  ingest->add_option("--format", format, "checkin or csv")->check(CLI::IsMember({"checkin", "csv"}));

  bool per_run = false;
  auto* simulate = app.add_subcommand("simulate", "Ground-truth diffusion on the full population");
  add_common(simulate, common);
  simulate->add_flag("--per-run", per_run, "Store every run's curve in simulation.json");

  std::string method = "all";
  std::optional<double> p_s;
  int draw = 0;
  bool input_is_sample = false;
  auto* estimate = app.add_subcommand("estimate", "Run estimators on one sub-sample");
  add_common(estimate, common);
  estimate->add_option("--method", method, "scale, density, pollspreader, pollsusceptible, pollsus_lower, pollsus_upper or all");
  estimate->add_option("--p_s", p_s, "Sampling probability (default: first experiment.p_s)");
  estimate->add_option("--draw", draw, "Sample draw index");
  estimate->add_flag("--input-is-sample", input_is_sample, "Treat the dataset itself as the observed sub-sample");

  auto* evaluate = app.add_subcommand("evaluate", "Full experiment: ground truth, draws, estimators, report");
  add_common(evaluate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string help;
    for (auto* sub : app.get_subcommands()) help = sub->help();
    err << "error: " << e.what() << '\n';
    if (!help.empty()) err << help;
    return 1;
  }

  try {
    if (exponents->parsed()) return cmd_exponents(exp_p_s, exp_p_min, digits, out);
    if (synth->parsed()) return cmd_synth(common, out);
    if (ingest->parsed()) return cmd_ingest(common, input, format, out);
    if (simulate->parsed()) return cmd_simulate(common, per_run, out);
    if (estimate->parsed()) return cmd_estimate(common, method, p_s, draw, input_is_sample, out, err);
    if (evaluate->parsed()) return cmd_evaluate(common, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace spread
