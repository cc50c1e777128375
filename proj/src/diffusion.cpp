#include "spread/diffusion.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "spread/parallel.hpp"
#include "spread/random.hpp"

namespace spread {

void DiffusionParams::validate() const {
  if (mu_is <= 0) throw InvalidInput("mu_IS must be positive");
  if (mu_r <= mu_is) throw InvalidInput("mu_R must exceed mu_IS");
  if (!(p_inf >= 0.0 && p_inf <= 1.0)) throw InvalidInput("p_inf must lie in [0, 1]");
  if (!(p_init >= 0.0 && p_init <= 1.0)) throw InvalidInput("p_init must lie in [0, 1]");
  for (const auto& [id, p] : p_init_by_node) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInput("p_init of individual " + std::to_string(id) + " must lie in [0, 1]");
    }
  }
  if (!(d_max > 0.0) || !std::isfinite(d_max)) throw InvalidInput("d_max must be positive");
  if (t_min < 0) throw InvalidInput("t_min must be non-negative");
}

Status HealthTimeline::status_at(Seconds t, const DiffusionParams& params) const {
  if (!infection_time || t < *infection_time) return Status::kSusceptible;
  if (t < *infection_time + params.mu_is) return Status::kInfectedNotSpreading;
  if (t < *infection_time + params.mu_r) return Status::kInfectedSpreading;
  return Status::kRecovered;
}

std::size_t SimulationResult::count_at(Seconds t) const {
  auto it = std::find(times.begin(), times.end(), t);
  if (it != times.end()) return cumulative[static_cast<std::size_t>(it - times.begin())];
  return static_cast<std::size_t>(std::count_if(
      timelines.begin(), timelines.end(), [t](const HealthTimeline& h) { return h.infected_by(t); }));
}

double ExactResult::probability_of(NodeId u) const {
  auto it = std::find(nodes.begin(), nodes.end(), u);
  if (it == nodes.end()) throw InvalidInput("unknown individual " + std::to_string(u));
  return probability[static_cast<std::size_t>(it - nodes.begin())];
}

namespace {

constexpr Seconds kNever = -1;

/// Maps arbitrary node ids onto 0..n-1.
class NodeIndex {
 public:
  explicit NodeIndex(std::span<const NodeId> nodes) {
    NodeId max_id = 0;
    for (NodeId u : nodes) max_id = std::max(max_id, u);
    if (static_cast<std::size_t>(max_id) <= 64 * nodes.size() + 1024) {
      dense_.assign(static_cast<std::size_t>(max_id) + 1, -1);
      for (std::size_t i = 0; i < nodes.size(); ++i) dense_[nodes[i]] = static_cast<std::int32_t>(i);
    } else {
      for (std::size_t i = 0; i < nodes.size(); ++i) sparse_[nodes[i]] = static_cast<std::int32_t>(i);
    }
  }

  std::int32_t operator()(NodeId u) const {
    if (!dense_.empty()) return u < dense_.size() ? dense_[u] : -1;
    auto it = sparse_.find(u);
    return it == sparse_.end() ? -1 : it->second;
  }

 private:
  std::vector<std::int32_t> dense_;
  std::unordered_map<NodeId, std::int32_t> sparse_;
};

struct IndexedContact {
  std::int32_t a;
  std::int32_t b;
  Seconds start;
};

std::vector<IndexedContact> index_contacts(std::span<const Contact> contacts,
                                           const NodeIndex& index) {
  std::vector<Contact> sorted;
  std::span<const Contact> view = contacts;
  if (!std::is_sorted(contacts.begin(), contacts.end(), contact_time_order)) {
    sorted.assign(contacts.begin(), contacts.end());
    std::sort(sorted.begin(), sorted.end(), contact_time_order);
    view = sorted;
  }
  std::vector<IndexedContact> out;
  out.reserve(view.size());
  for (const Contact& c : view) {
    const auto a = index(c.u);
    const auto b = index(c.v);
    if (a < 0 || b < 0) throw InvalidInput("contact references an individual outside the node set");
    out.push_back({a, b, c.start});
  }
  return out;
}

/// The deterministic state machine shared by the simulator and the
/// enumeration oracle. `coin(i)` decides whether contact i transmits.
template <typename Coin>
void replay(std::span<const IndexedContact> contacts, const DiffusionParams& params,
            std::vector<Seconds>& infection, Coin&& coin) {
  auto spreading = [&](std::int32_t k, Seconds t) {
    const Seconds inf = infection[static_cast<std::size_t>(k)];
    return inf != kNever && t >= inf + params.mu_is && t < inf + params.mu_r;
  };
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const auto& c = contacts[i];
    const bool a_sus = infection[static_cast<std::size_t>(c.a)] == kNever;
    const bool b_sus = infection[static_cast<std::size_t>(c.b)] == kNever;
    if (a_sus == b_sus) continue;
    const std::int32_t source = a_sus ? c.b : c.a;
    const std::int32_t target = a_sus ? c.a : c.b;
    if (spreading(source, c.start) && coin(i)) {
      infection[static_cast<std::size_t>(target)] = c.start;
    }
  }
}

SimulationResult simulate_indexed(std::span<const IndexedContact> contacts,
                                  std::span<const NodeId> nodes, const DiffusionParams& params,
                                  std::uint64_t seed, std::span<const Seconds> times) {
  std::vector<Seconds> infection(nodes.size(), kNever);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (rng::uniform(seed, rng::kInitialInfection, nodes[k]) < params.initial_probability(nodes[k])) {
      infection[k] = 0;
    }
  }
  replay(contacts, params, infection, [&](std::size_t i) {
    return rng::uniform(seed, rng::kContactCoin, i) < params.p_inf;
  });

  SimulationResult result;
  result.timelines.reserve(nodes.size());
  std::vector<Seconds> sorted_inf;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    HealthTimeline h{nodes[k], std::nullopt};
    if (infection[k] != kNever) {
      h.infection_time = infection[k];
      sorted_inf.push_back(infection[k]);
    }
    result.timelines.push_back(h);
  }
  std::sort(sorted_inf.begin(), sorted_inf.end());
  result.times.assign(times.begin(), times.end());
  for (Seconds t : times) {
    result.cumulative.push_back(static_cast<std::size_t>(
        std::upper_bound(sorted_inf.begin(), sorted_inf.end(), t) - sorted_inf.begin()));
  }
  return result;
}

}  // namespace

SimulationResult simulate_once(std::span<const Contact> contacts, std::span<const NodeId> nodes,
                               const DiffusionParams& params, std::uint64_t seed,
                               std::span<const Seconds> times) {
  params.validate();
  const NodeIndex index(nodes);
  const auto indexed = index_contacts(contacts, index);
  return simulate_indexed(indexed, nodes, params, seed, times);
}

GroundTruth ground_truth(std::span<const Contact> contacts, std::span<const NodeId> nodes,
                         const DiffusionParams& params, int runs, std::uint64_t master_seed,
                         std::span<const Seconds> times) {
  if (runs < 1) throw InvalidInput("ground truth needs at least one run");
  params.validate();
  const NodeIndex index(nodes);
  const auto indexed = index_contacts(contacts, index);

  GroundTruth gt;
  gt.times.assign(times.begin(), times.end());
  gt.runs.resize(static_cast<std::size_t>(runs));
  parallel_for(gt.runs.size(), [&](std::size_t r) {
    const auto seed = rng::derive(master_seed, rng::kRun, r);
    gt.runs[r] = simulate_indexed(indexed, nodes, params, seed, times).cumulative;
  });

  gt.mean.assign(times.size(), 0.0);
  gt.stddev.assign(times.size(), 0.0);
  for (std::size_t j = 0; j < times.size(); ++j) {
    double sum = 0.0;
    for (const auto& run : gt.runs) sum += static_cast<double>(run[j]);
    const double mean = sum / runs;
    double ss = 0.0;
    for (const auto& run : gt.runs) {
      const double d = static_cast<double>(run[j]) - mean;
      ss += d * d;
    }
    gt.mean[j] = mean;
    gt.stddev[j] = runs > 1 ? std::sqrt(ss / (runs - 1)) : 0.0;
  }
  return gt;
}

ExactResult enumerate_exact(std::span<const Contact> contacts, std::span<const NodeId> nodes,
                            const DiffusionParams& params, Seconds t) {
  params.validate();
  const NodeIndex index(nodes);
  auto indexed = index_contacts(contacts, index);
  std::erase_if(indexed, [t](const IndexedContact& c) { return c.start > t; });

  const std::size_t n = nodes.size();
  const std::size_t m = indexed.size();
  if (n + m > static_cast<std::size_t>(kMaxEnumerationBits)) {
    throw InvalidInput("instance too large for exhaustive enumeration (" + std::to_string(n) +
                       " nodes + " + std::to_string(m) + " contacts > " +
                       std::to_string(kMaxEnumerationBits) + ")");
  }

  std::vector<double> p0(n);
  for (std::size_t k = 0; k < n; ++k) p0[k] = params.initial_probability(nodes[k]);

  ExactResult result;
  result.nodes.assign(nodes.begin(), nodes.end());
  result.probability.assign(n, 0.0);
  std::vector<Seconds> infection(n);
  for (std::uint64_t init = 0; init < (std::uint64_t{1} << n); ++init) {
    double w_init = 1.0;
    for (std::size_t k = 0; k < n; ++k) w_init *= (init >> k & 1) ? p0[k] : 1.0 - p0[k];
    if (w_init == 0.0) continue;
    for (std::uint64_t coins = 0; coins < (std::uint64_t{1} << m); ++coins) {
      double w = w_init;
      for (std::size_t i = 0; i < m; ++i) w *= (coins >> i & 1) ? params.p_inf : 1.0 - params.p_inf;
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) infection[k] = (init >> k & 1) ? 0 : kNever;
      replay(indexed, params, infection, [coins](std::size_t i) { return (coins >> i & 1) != 0; });
      for (std::size_t k = 0; k < n; ++k) {
        if (infection[k] != kNever && infection[k] <= t) result.probability[k] += w;
      }
    }
  }
  for (double p : result.probability) result.expected_count += p;
  return result;
}

}  // namespace spread
