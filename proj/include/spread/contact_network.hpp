#pragma once

#include <algorithm>
#include <iosfwd>
#include <span>
#include <vector>

#include "spread/common.hpp"
#include "spread/diffusion_params.hpp"
#include "spread/mobility.hpp"

namespace spread {

/// Time-varying contact graph over a node set V. Every unordered contact is
/// visible from both endpoints; per-pair contact lists are sorted by start.
/// Immutable after construction and safe for concurrent readers.
class ContactNetwork {
 public:
  struct Adjacent {
    NodeId node;
    std::uint32_t first;  // offset into the shared contact pool
    std::uint32_t count;
  };

  ContactNetwork() = default;

  /// Throws InvalidInput when a contact references a node outside `nodes`,
  /// when the same contact appears twice, or when population < |nodes|.
  static ContactNetwork build(std::span<const Contact> contacts, std::span<const NodeId> nodes,
                              std::size_t population);

  std::size_t population_size() const { return population_; }
  std::span<const NodeId> nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  bool contains(NodeId u) const;

  /// Adjacent nodes of u in ascending id order, over the whole horizon.
  std::span<const Adjacent> adjacency(NodeId u) const;

  /// Contact start times of the pair, ascending. Empty if never in contact.
  std::span<const Seconds> contact_starts(NodeId u, NodeId v) const;
  std::span<const Seconds> contact_starts(const Adjacent& a) const {
    return {starts_.data() + a.first, a.count};
  }

  /// All v with a contact (u, v) starting in [s, t], ascending.
  std::vector<NodeId> neighbors(NodeId u, Seconds s, Seconds t) const;

  std::span<const Contact> contacts() const { return contacts_; }

  /// Largest number of contacts shared by a single pair.
  std::size_t max_pair_contacts() const { return max_pair_contacts_; }

 private:
  std::size_t local_index(NodeId u) const;

  std::size_t population_ = 0;
  std::vector<NodeId> nodes_;                 // sorted
  std::vector<std::uint32_t> offsets_;        // per node, into adjacency_
  std::vector<Adjacent> adjacency_;
  std::vector<Seconds> starts_;
  std::vector<Contact> contacts_;             // time-sorted
  std::size_t max_pair_contacts_ = 0;
};

/// Number of contact starts in [lo, hi).
inline std::size_t count_in_window(std::span<const Seconds> sorted, Seconds lo, Seconds hi) {
  if (hi <= lo) return 0;
  const auto* a = std::lower_bound(sorted.data(), sorted.data() + sorted.size(), lo);
  const auto* b = std::lower_bound(a, sorted.data() + sorted.size(), hi);
  return static_cast<std::size_t>(b - a);
}

/// Probability that v is infected by u, given u infected at s, counting the
/// contacts that start in [s + mu_IS, min(t, s + mu_R)).
double edge_weight(const ContactNetwork& net, NodeId u, NodeId v, Seconds s, Seconds t,
                   const DiffusionParams& params);

/// Expected weight crossing the random initial-infection cut of G_{0,t}.
double cut_statistic_full(const ContactNetwork& net, Seconds t, const DiffusionParams& params);

/// Cut statistic of a sub-sampled network, scaled by 1 / p_s^2.
double cut_statistic_sampled(const ContactNetwork& sample_net, Seconds t,
                             const DiffusionParams& params, double p_s);

/// CSV dump: u,v,contact_start_s,contact_end_s (one row per contact).
void write_network_csv(std::ostream& out, const ContactNetwork& net);

}  // namespace spread
