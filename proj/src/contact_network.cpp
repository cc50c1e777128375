#include "spread/contact_network.hpp"

#include <ostream>
#include <string>
#include <tuple>

namespace spread {

ContactNetwork ContactNetwork::build(std::span<const Contact> contacts,
                                     std::span<const NodeId> nodes, std::size_t population) {
  ContactNetwork net;
  net.nodes_.assign(nodes.begin(), nodes.end());
  std::sort(net.nodes_.begin(), net.nodes_.end());
  net.nodes_.erase(std::unique(net.nodes_.begin(), net.nodes_.end()), net.nodes_.end());
  if (population < net.nodes_.size()) {
    throw InvalidInput("population size is smaller than the node set");
  }
  net.population_ = population;

  std::vector<Contact> sorted(contacts.begin(), contacts.end());
  for (Contact& c : sorted) {
    if (c.u > c.v) std::swap(c.u, c.v);
    if (c.u == c.v) throw InvalidInput("contact of an individual with itself");
    if (!net.contains(c.u) || !net.contains(c.v)) {
      throw InvalidInput("contact references unknown individual " +
                         std::to_string(net.contains(c.u) ? c.v : c.u));
    }
  }
  std::sort(sorted.begin(), sorted.end(), [](const Contact& a, const Contact& b) {
    return std::tie(a.u, a.v, a.start, a.end) < std::tie(b.u, b.v, b.start, b.end);
  });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidInput("duplicate contact in input");
  }

  struct Entry {
    std::uint32_t owner;
    Adjacent adj;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    const auto first = static_cast<std::uint32_t>(net.starts_.size());
    while (j < sorted.size() && sorted[j].u == sorted[i].u && sorted[j].v == sorted[i].v) {
      net.starts_.push_back(sorted[j].start);
      ++j;
    }
    const auto count = static_cast<std::uint32_t>(j - i);
    net.max_pair_contacts_ = std::max<std::size_t>(net.max_pair_contacts_, count);
    const auto lu = static_cast<std::uint32_t>(net.local_index(sorted[i].u));
    const auto lv = static_cast<std::uint32_t>(net.local_index(sorted[i].v));
    entries.push_back({lu, {sorted[i].v, first, count}});
    entries.push_back({lv, {sorted[i].u, first, count}});
    i = j;
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.owner, a.adj.node) < std::tie(b.owner, b.adj.node);
  });
  net.offsets_.assign(net.nodes_.size() + 1, 0);
  net.adjacency_.reserve(entries.size());
  for (const Entry& e : entries) {
    ++net.offsets_[e.owner + 1];
    net.adjacency_.push_back(e.adj);
  }
  for (std::size_t k = 1; k < net.offsets_.size(); ++k) net.offsets_[k] += net.offsets_[k - 1];

  std::sort(sorted.begin(), sorted.end(), contact_time_order);
  net.contacts_ = std::move(sorted);
  return net;
}

bool ContactNetwork::contains(NodeId u) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), u);
}

std::size_t ContactNetwork::local_index(NodeId u) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), u);
  if (it == nodes_.end() || *it != u) {
    throw InvalidInput("unknown individual " + std::to_string(u));
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::span<const ContactNetwork::Adjacent> ContactNetwork::adjacency(NodeId u) const {
  const std::size_t k = local_index(u);
  return {adjacency_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
}

std::span<const Seconds> ContactNetwork::contact_starts(NodeId u, NodeId v) const {
  const auto adj = adjacency(u);
  auto it = std::lower_bound(adj.begin(), adj.end(), v,
                             [](const Adjacent& a, NodeId id) { return a.node < id; });
  if (it == adj.end() || it->node != v) return {};
  return contact_starts(*it);
}

std::vector<NodeId> ContactNetwork::neighbors(NodeId u, Seconds s, Seconds t) const {
  if (s > t) throw InvalidInput("neighbors window must satisfy s <= t");
  std::vector<NodeId> out;
  for (const Adjacent& a : adjacency(u)) {
    if (count_in_window(contact_starts(a), s, t + 1) > 0) out.push_back(a.node);
  }
  return out;
}

double edge_weight(const ContactNetwork& net, NodeId u, NodeId v, Seconds s, Seconds t,
                   const DiffusionParams& params) {
  const auto starts = net.contact_starts(u, v);
  const auto m = count_in_window(starts, s + params.mu_is, std::min(t, s + params.mu_r));
  if (m == 0) return 0.0;
  return 1.0 - std::pow(1.0 - params.p_inf, static_cast<double>(m));
}

double cut_statistic_full(const ContactNetwork& net, Seconds t, const DiffusionParams& params) {
  double total = 0.0;
  for (NodeId u : net.nodes()) {
    const double pu = params.initial_probability(u);
    for (const auto& a : net.adjacency(u)) {
      const auto starts = net.contact_starts(a);
      if (count_in_window(starts, 0, t + 1) == 0) continue;  // not an edge of G_{0,t}
      const auto m = count_in_window(starts, params.mu_is, std::min(t, params.mu_r));
      if (m == 0) continue;
      const double w = 1.0 - std::pow(1.0 - params.p_inf, static_cast<double>(m));
      total += pu * (1.0 - params.initial_probability(a.node)) * w;
    }
  }
  return total;
}

double cut_statistic_sampled(const ContactNetwork& sample_net, Seconds t,
                             const DiffusionParams& params, double p_s) {
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidInput("p_s must lie in (0, 1]");
  return cut_statistic_full(sample_net, t, params) / (p_s * p_s);
}

void write_network_csv(std::ostream& out, const ContactNetwork& net) {
  out << "u,v,contact_start_s,contact_end_s\n";
  for (const Contact& c : net.contacts()) {
    out << c.u << ',' << c.v << ',' << c.start << ',' << c.end << '\n';
  }
}

}  // namespace spread
