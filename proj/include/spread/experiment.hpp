#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spread/data.hpp"
#include "spread/diffusion.hpp"
#include "spread/estimators.hpp"

namespace spread {

struct SampleSet {
  std::vector<NodeId> ids;  // ascending
  double p_s = 1.0;
  std::uint64_t seed = 0;
};

/// Independent Bernoulli(p_s) membership per id, keyed by (seed, id).
SampleSet draw_sample(std::span<const NodeId> population, double p_s, std::uint64_t seed);

/// Per timestamp: mean over draws of |estimate - truth|.
std::vector<double> mae(std::span<const EstimateSeries> estimates, std::span<const Seconds> times,
                        std::span<const double> truth);

/// Per timestamp: (mean over draws of estimate) - truth.
std::vector<double> bias(std::span<const EstimateSeries> estimates, std::span<const Seconds> times,
                         std::span<const double> truth);

struct ExperimentConfig {
  DiffusionParams params;
  std::vector<double> p_s_values{0.025, 0.05, 0.1, 0.2};
  int draws = 10;
  int ground_truth_runs = 10;
  int scale_runs = 10;
  std::vector<Method> methods{Method::kScale, Method::kDensity, Method::kPollSpreader,
                              Method::kPollSusLower, Method::kPollSusUpper};
  std::uint64_t master_seed = 1;
  std::optional<std::size_t> population;  // defaults to the dataset size
  int density_cells = 100;
  PollSusOptions pollsus;

  void validate() const;
};

struct DrawResult {
  Method method = Method::kScale;
  double p_s = 1.0;
  int draw = 0;
  std::size_t sample_size = 0;
  std::optional<EstimateSeries> series;
  std::string error;  // set when the estimator failed on this draw
};

struct MethodSummary {
  Method method = Method::kScale;
  double p_s = 1.0;
  std::vector<double> mae;
  std::vector<double> bias;
  std::size_t failures = 0;
  bool feasible = true;
};

struct EvaluationReport {
  std::string dataset_id;
  std::size_t population = 0;
  std::size_t contacts = 0;
  double daily_colocations = 0.0;
  std::vector<Seconds> times;
  GroundTruth truth;
  std::vector<DrawResult> draws;       // ordered by (p_s, draw, method)
  std::vector<MethodSummary> summary;  // ordered by (p_s, method)
};

/// Ground truth on the full contact set, then `draws` sub-samples per p_s with
/// every enabled estimator on each. Estimator errors are recorded per draw.
EvaluationReport run_experiment(const Dataset& dataset, std::span<const Contact> contacts,
                                const ExperimentConfig& config);

nlohmann::ordered_json report_to_json(const EvaluationReport& report,
                                      const nlohmann::ordered_json& resolved_config);

/// Writes report.json, curves.csv, summary.csv and ground_truth.csv into dir.
void write_report(const std::string& dir, const EvaluationReport& report,
                  const nlohmann::ordered_json& resolved_config);

}  // namespace spread
