#include "spread/diffusion.hpp"
#include "spread/estimators.hpp"
#include "spread/parallel.hpp"
#include "spread/random.hpp"

namespace spread {

EstimateSeries scale_estimate(std::span<const Contact> sample_contacts,
                              std::span<const NodeId> sample_ids, const DiffusionParams& params,
                              double p_s, int runs, std::uint64_t seed,
                              std::span<const Seconds> times) {
  params.validate();
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidInput("p_s must lie in (0, 1]");
  if (runs < 1) throw InvalidInput("Scale needs at least one simulation run");

  std::vector<std::vector<std::size_t>> curves(static_cast<std::size_t>(runs));
  parallel_for(curves.size(), [&](std::size_t r) {
    curves[r] = simulate_once(sample_contacts, sample_ids, params,
                              rng::derive(seed, rng::kScale, r), times)
                    .cumulative;
  });

  EstimateSeries out;
  out.method = Method::kScale;
  out.times.assign(times.begin(), times.end());
  out.values.assign(times.size(), 0.0);
  out.p_s = p_s;
  out.seed = seed;
  for (const auto& curve : curves) {
    for (std::size_t j = 0; j < times.size(); ++j) out.values[j] += static_cast<double>(curve[j]);
  }
  for (double& v : out.values) v /= static_cast<double>(runs) * p_s;
  return out;
}

}  // namespace spread
