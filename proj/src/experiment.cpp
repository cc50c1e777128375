#include "spread/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "spread/contact_network.hpp"
#include "spread/parallel.hpp"
#include "spread/random.hpp"

namespace spread {

SampleSet draw_sample(std::span<const NodeId> population, double p_s, std::uint64_t seed) {
  if (!(p_s >= 0.0 && p_s <= 1.0)) throw InvalidInput("p_s must lie in [0, 1]");
  SampleSet s;
  s.p_s = p_s;
  s.seed = seed;
  for (NodeId u : population) {
    if (rng::uniform(seed, rng::kSample, u) < p_s) s.ids.push_back(u);
  }
  std::sort(s.ids.begin(), s.ids.end());
  return s;
}

namespace {

void check_aligned(std::span<const EstimateSeries> estimates, std::span<const Seconds> times,
                   std::span<const double> truth) {
  if (times.size() != truth.size()) throw InvalidInput("truth series and timestamps differ in length");
  for (const auto& e : estimates) {
    if (!std::equal(e.times.begin(), e.times.end(), times.begin(), times.end()) ||
        e.values.size() != times.size()) {
      throw InvalidInput("estimate timestamps do not match the truth series");
    }
  }
}

std::vector<double> reduce(std::span<const EstimateSeries> estimates, std::span<const Seconds> times,
                           std::span<const double> truth, bool absolute) {
  check_aligned(estimates, times, truth);
  std::vector<double> out(times.size(), std::numeric_limits<double>::quiet_NaN());
  if (estimates.empty()) return out;
  for (std::size_t j = 0; j < times.size(); ++j) {
    double sum = 0.0;
    for (const auto& e : estimates) {
      const double d = e.values[j] - truth[j];
      sum += absolute ? std::abs(d) : d;
    }
    out[j] = sum / static_cast<double>(estimates.size());
  }
  return out;
}

}  // namespace

std::vector<double> mae(std::span<const EstimateSeries> estimates, std::span<const Seconds> times,
                        std::span<const double> truth) {
  return reduce(estimates, times, truth, true);
}

std::vector<double> bias(std::span<const EstimateSeries> estimates, std::span<const Seconds> times,
                         std::span<const double> truth) {
  return reduce(estimates, times, truth, false);
}

void ExperimentConfig::validate() const {
  params.validate();
  if (p_s_values.empty()) throw InvalidInput("at least one p_s value is required");
  for (double p : p_s_values) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("every p_s must lie in (0, 1]");
  }
  if (draws < 1) throw InvalidInput("draws must be at least 1");
  if (ground_truth_runs < 1) throw InvalidInput("ground-truth runs must be at least 1");
  if (scale_runs < 1) throw InvalidInput("Scale runs must be at least 1");
  if (methods.empty()) throw InvalidInput("at least one estimator must be enabled");
  if (density_cells < 1) throw InvalidInput("density grid needs at least one cell per side");
  if (!(pollsus.prune_below >= 0.0 && pollsus.prune_below < 1.0)) {
    throw InvalidInput("PollSusceptible pruning threshold must lie in [0, 1)");
  }
}

EvaluationReport run_experiment(const Dataset& dataset, std::span<const Contact> contacts,
                                const ExperimentConfig& config) {
  config.validate();
  const auto ids = dataset.ids();
  if (ids.empty()) throw InvalidInput("dataset has no individuals");
  const std::size_t population = config.population.value_or(ids.size());
  if (population < ids.size()) throw InvalidInput("population is smaller than the dataset");

  EvaluationReport report;
  report.dataset_id = dataset.manifest.dataset_id;
  report.population = population;
  report.contacts = contacts.size();
  report.daily_colocations =
      average_daily_colocations(contacts.size(), ids.size(), dataset.manifest.horizon_end);
  report.times = evaluation_grid(dataset.manifest.horizon_end);
  report.truth = ground_truth(contacts, ids, config.params, config.ground_truth_runs,
                              rng::derive(config.master_seed, rng::kRun), report.times);

  NodeId max_id = 0;
  for (NodeId u : ids) max_id = std::max(max_id, u);

  const std::size_t per_ps = static_cast<std::size_t>(config.draws);
  const std::size_t tasks = config.p_s_values.size() * per_ps;
  const std::size_t m = config.methods.size();
  report.draws.resize(tasks * m);

  parallel_for(tasks, [&](std::size_t task) {
    const std::size_t i = task / per_ps;
    const int d = static_cast<int>(task % per_ps);
    const double p_s = config.p_s_values[i];
    const auto sample = draw_sample(ids, p_s, rng::derive(config.master_seed, rng::kDraw, i, d));

    std::vector<bool> keep(static_cast<std::size_t>(max_id) + 1, false);
    for (NodeId u : sample.ids) keep[u] = true;
    const auto sample_contacts = restrict_contacts(contacts, keep);
    std::vector<Trajectory> sample_trajs;
    for (const auto& tr : dataset.trajectories) {
      if (keep[tr.id()]) sample_trajs.push_back(tr);
    }

    std::optional<ContactNetwork> net;
    std::optional<PollSusSeries> pollsus;
    for (std::size_t k = 0; k < m; ++k) {
      DrawResult& out = report.draws[task * m + k];
      out.method = config.methods[k];
      out.p_s = p_s;
      out.draw = d;
      out.sample_size = sample.ids.size();
      try {
        if (!net && out.method != Method::kScale && out.method != Method::kDensity) {
          net = ContactNetwork::build(sample_contacts, sample.ids, population);
        }
        switch (out.method) {
          case Method::kScale:
            out.series = scale_estimate(sample_contacts, sample.ids, config.params, p_s,
                                        config.scale_runs,
                                        rng::derive(config.master_seed, rng::kScale, i, d),
                                        report.times);
            break;
          case Method::kDensity:
            out.series = density_estimate(sample_trajs, config.params, p_s, population,
                                          report.times, config.density_cells);
            break;
          case Method::kPollSpreader:
            out.series = pollspreader_estimate(*net, config.params, p_s, report.times);
            break;
          case Method::kPollSusLower:
          case Method::kPollSusUpper:
            if (!pollsus) {
              pollsus = pollsusceptible_estimate(*net, config.params, p_s, report.times, config.pollsus);
            }
            out.series = out.method == Method::kPollSusLower ? pollsus->lower : pollsus->upper;
            break;
        }
        out.series->seed = sample.seed;
      } catch (const std::exception& e) {
        out.series.reset();
        out.error = e.what();
      }
    }
  });

  for (std::size_t i = 0; i < config.p_s_values.size(); ++i) {
    for (Method method : config.methods) {
      MethodSummary s;
      s.method = method;
      s.p_s = config.p_s_values[i];
      std::vector<EstimateSeries> ok;
      for (const DrawResult& r : report.draws) {
        if (r.method != method || r.p_s != s.p_s) continue;
        if (r.series) {
          ok.push_back(*r.series);
          s.feasible = s.feasible && r.series->feasible;
        } else {
          ++s.failures;
        }
      }
      s.mae = mae(ok, report.times, report.truth.mean);
      s.bias = bias(ok, report.times, report.truth.mean);
      report.summary.push_back(std::move(s));
    }
  }
  return report;
}

namespace {

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::ordered_json array_of(const std::vector<double>& v) {
  auto a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

double day_of(Seconds t) { return static_cast<double>(t) / kSecondsPerDay; }

}  // namespace

nlohmann::ordered_json report_to_json(const EvaluationReport& report,
                                      const nlohmann::ordered_json& resolved_config) {
  using json = nlohmann::ordered_json;
  json j;
  j["config"] = resolved_config;
  j["dataset"] = {{"id", report.dataset_id},
                  {"population", report.population},
                  {"contacts", report.contacts},
                  {"average_daily_colocations", report.daily_colocations}};
  auto days = json::array();
  for (Seconds t : report.times) days.push_back(day_of(t));
  j["days"] = days;
  json runs = json::array();
  for (const auto& r : report.truth.runs) runs.push_back(r);
  j["ground_truth"] = {{"mean", array_of(report.truth.mean)},
                       {"stddev", array_of(report.truth.stddev)},
                       {"runs", runs}};
  json estimates = json::array();
  for (const DrawResult& r : report.draws) {
    json e;
    e["method"] = std::string(method_name(r.method));
    e["p_s"] = r.p_s;
    e["draw"] = r.draw;
    e["sample_size"] = r.sample_size;
    if (r.series) {
      e["seed"] = r.series->seed;
      e["feasible"] = r.series->feasible;
      if (r.series->p_min) e["p_min"] = *r.series->p_min;
      if (r.series->c_l) e["c_l"] = *r.series->c_l;
      e["c_u"] = r.series->c_u ? json(*r.series->c_u) : json(nullptr);
      e["values"] = array_of(r.series->values);
    } else {
      e["error"] = r.error;
    }
    estimates.push_back(std::move(e));
  }
  j["estimates"] = std::move(estimates);
  json summary = json::array();
  for (const MethodSummary& s : report.summary) {
    summary.push_back({{"method", std::string(method_name(s.method))},
                       {"p_s", s.p_s},
                       {"failures", s.failures},
                       {"feasible", s.feasible},
                       {"mae", array_of(s.mae)},
                       {"bias", array_of(s.bias)}});
  }
  j["summary"] = std::move(summary);
  return j;
}

void write_report(const std::string& dir, const EvaluationReport& report,
                  const nlohmann::ordered_json& resolved_config) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.json");
    out << report_to_json(report, resolved_config).dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "curves.csv");
    out << "day,method,p_s,draw,value\n";
    for (const DrawResult& r : report.draws) {
      if (!r.series) continue;
      for (std::size_t j = 0; j < report.times.size(); ++j) {
        out << format_double(day_of(report.times[j])) << ',' << method_name(r.method) << ','
            << format_double(r.p_s) << ',' << r.draw << ',' << format_double(r.series->values[j]) << '\n';
      }
    }
  }
  {
    std::ofstream out(fs::path(dir) / "summary.csv");
    out << "day,method,p_s,mae,bias\n";
    for (const MethodSummary& s : report.summary) {
      for (std::size_t j = 0; j < report.times.size(); ++j) {
        out << format_double(day_of(report.times[j])) << ',' << method_name(s.method) << ','
            << format_double(s.p_s) << ',' << format_double(s.mae[j]) << ','
            << format_double(s.bias[j]) << '\n';
      }
    }
  }
  {
    std::ofstream out(fs::path(dir) / "ground_truth.csv");
    out << "day,mean,std\n";
    for (std::size_t j = 0; j < report.times.size(); ++j) {
      out << format_double(day_of(report.times[j])) << ',' << format_double(report.truth.mean[j])
          << ',' << format_double(report.truth.stddev[j]) << '\n';
    }
  }
}

}  // namespace spread
