#include <cmath>

#include "spread/estimators.hpp"

namespace spread {

double pollspreader_probability(double p_init, double expected_susceptible, double cut) {
  if (!(expected_susceptible > 1.0)) {
    throw InvalidInput("PollSpreader needs an expected susceptible count above 1 (got " +
                       std::to_string(expected_susceptible) + ")");
  }
  const double miss = std::pow(1.0 - 1.0 / expected_susceptible, cut);
  return p_init + (1.0 - p_init) * (1.0 - miss);
}

EstimateSeries pollspreader_estimate(const ContactNetwork& sample_net,
                                     const DiffusionParams& params, double p_s,
                                     std::span<const Seconds> times) {
  params.validate();
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidInput("p_s must lie in (0, 1]");
  const double n = static_cast<double>(sample_net.population_size());
  const double expected_susceptible = n * (1.0 - params.p_init);
  if (!(expected_susceptible > 1.0)) {
    throw InvalidInput("PollSpreader needs n * (1 - p_init) > 1 (n = " + std::to_string(n) +
                       ", p_init = " + std::to_string(params.p_init) + ")");
  }

  EstimateSeries out;
  out.method = Method::kPollSpreader;
  out.times.assign(times.begin(), times.end());
  out.p_s = p_s;
  out.values.reserve(times.size());
  for (Seconds t : times) {
    const double cut = cut_statistic_sampled(sample_net, t, params, p_s);
    out.values.push_back(n * pollspreader_probability(params.p_init, expected_susceptible, cut));
  }
  return out;
}

}  // namespace spread
