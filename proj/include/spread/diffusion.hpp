#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spread/common.hpp"
#include "spread/diffusion_params.hpp"
#include "spread/mobility.hpp"

namespace spread {

enum class Status { kSusceptible, kInfectedNotSpreading, kInfectedSpreading, kRecovered };

struct HealthTimeline {
  NodeId id = 0;
  std::optional<Seconds> infection_time;  // 0 for initial infections

  Status status_at(Seconds t, const DiffusionParams& params) const;
  bool infected_by(Seconds t) const { return infection_time && *infection_time <= t; }
};

struct SimulationResult {
  std::vector<HealthTimeline> timelines;  // in node order
  std::vector<Seconds> times;
  std::vector<std::size_t> cumulative;    // |{u : infection_time <= t}| per time

  std::size_t count_at(Seconds t) const;
};

/// One seeded run. Initial infections are independent Bernoulli(p_init) draws;
/// contacts are replayed in time order and a contact starting at t1 infects the
/// susceptible endpoint when the other endpoint is IS at t1 and the contact's
/// uniform draw falls below p_inf. Draws are keyed by (seed, node) and
/// (seed, contact index), so raising p_inf never removes an infection.
SimulationResult simulate_once(std::span<const Contact> contacts, std::span<const NodeId> nodes,
                               const DiffusionParams& params, std::uint64_t seed,
                               std::span<const Seconds> times);

struct GroundTruth {
  std::vector<Seconds> times;
  std::vector<double> mean;
  std::vector<double> stddev;                   // sample standard deviation across runs
  std::vector<std::vector<std::size_t>> runs;   // per run, per time
};

/// Mean and spread of the cumulative curve over `runs` independent seeds
/// derived from master_seed. Runs execute in parallel.
GroundTruth ground_truth(std::span<const Contact> contacts, std::span<const NodeId> nodes,
                         const DiffusionParams& params, int runs, std::uint64_t master_seed,
                         std::span<const Seconds> times);

struct ExactResult {
  std::vector<NodeId> nodes;
  std::vector<double> probability;  // P(infection_time <= t), in node order
  double expected_count = 0.0;

  double probability_of(NodeId u) const;
};

inline constexpr int kMaxEnumerationBits = 22;

/// Exhaustive expectation over every initial-infection vector and every
/// per-contact transmission outcome (contacts starting after t are ignored).
/// Refuses with InvalidInput when |nodes| + |relevant contacts| > 22.
ExactResult enumerate_exact(std::span<const Contact> contacts, std::span<const NodeId> nodes,
                            const DiffusionParams& params, Seconds t);

}  // namespace spread
