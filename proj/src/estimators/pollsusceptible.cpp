#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "spread/estimators.hpp"
#include "spread/parallel.hpp"

namespace spread {

BoundExponents compute_exponents(double p_s, double p_min) {
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidInput("p_s must lie in (0, 1]");
  if (std::isnan(p_min) || p_min > 1.0) throw InvalidInput("p_min must lie in (0, 1]");
  p_min = std::max(p_min, kMinPMin);

  BoundExponents e;
  e.p_min = p_min;
  e.c_l = 1.0 / p_s;
  const double a = std::log(p_min) / 8.0;
  const double disc = p_s * p_s + std::log(p_min) / 2.0;
  if (disc < 0.0) {
    e.feasible = false;
    return e;
  }
  // Smaller positive root of a c^2 + p_s c - 1 = 0, in the cancellation-free form.
  double c = 2.0 / (p_s + std::sqrt(disc));
  if (a < 0.0) {
    const double slope = 2.0 * a * c + p_s;
    if (slope != 0.0) c -= (a * c * c + p_s * c - 1.0) / slope;
  }
  e.c_u = c;
  return e;
}

double estimate_p_min(const ContactNetwork& sample_net, const DiffusionParams& params) {
  const double n_max = static_cast<double>(sample_net.max_pair_contacts());
  return std::max(kMinPMin, std::pow(1.0 - params.p_inf, n_max));
}

namespace {

double transmission_recursive(std::span<const NodeId> path, Seconds infected_at,
                              const ContactNetwork& net, const DiffusionParams& params,
                              Seconds horizon) {
  if (path.size() <= 1) return 1.0;
  const std::size_t k = path.size() - 1;
  const auto starts = net.contact_starts(path[k], path[k - 1]);
  const Seconds lo = infected_at + params.mu_is;
  const Seconds hi = std::min(infected_at + params.mu_r, horizon + 1);
  double total = 0.0;
  double survive = 1.0;
  for (auto it = std::lower_bound(starts.begin(), starts.end(), lo);
       it != starts.end() && *it < hi; ++it) {
    total += transmission_recursive(path.first(k), *it, net, params, horizon) * params.p_inf * survive;
    survive *= 1.0 - params.p_inf;
  }
  return total;
}

/// Closed integer intervals, sorted and disjoint.
using IntervalSet = std::vector<std::pair<Seconds, Seconds>>;

bool covers(const IntervalSet& set, Seconds x) {
  auto it = std::upper_bound(set.begin(), set.end(), x,
                             [](Seconds v, const auto& iv) { return v < iv.first; });
  return it != set.begin() && std::prev(it)->second >= x;
}

/// Per node, the start times of all its contacts paired with the adjacency
/// slot of the other endpoint, ordered by time.
class Incidence {
 public:
  explicit Incidence(const ContactNetwork& net) : nodes_(net.nodes()) {
    offsets_.reserve(nodes_.size() + 1);
    offsets_.push_back(0);
    for (NodeId u : nodes_) {
      const auto adj = net.adjacency(u);
      const std::size_t begin = entries_.size();
      for (std::uint32_t slot = 0; slot < adj.size(); ++slot) {
        for (Seconds s : net.contact_starts(adj[slot])) entries_.push_back({s, slot});
      }
      std::sort(entries_.begin() + static_cast<std::ptrdiff_t>(begin), entries_.end());
      offsets_.push_back(entries_.size());
    }
  }

  struct Entry {
    Seconds start;
    std::uint32_t slot;
    bool operator<(const Entry& o) const { return start != o.start ? start < o.start : slot < o.slot; }
  };

  std::span<const Entry> of(NodeId u) const {
    const auto i = static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), u) - nodes_.begin());
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

 private:
  std::span<const NodeId> nodes_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// Depth-first evaluation of the bound recursion over simple paths rooted at
/// v_0. Each level caches its chain transmission probability per infection
/// time, and tracks the infection times of v_k from which the chain can still
/// reach v_0 by t; children with no such time contribute exactly nothing.
class PathSearch {
 public:
  PathSearch(const ContactNetwork& net, const Incidence& incidence, const DiffusionParams& params,
             const BoundExponents& exponents, const PollSusOptions& options, Seconds t)
      : net_(net),
        incidence_(incidence),
        params_(params),
        options_(options),
        t_(t),
        c_l_(exponents.c_l),
        c_u_(exponents.upper_exponent()),
        max_hops_(t >= 0 ? static_cast<std::size_t>(t / params.mu_is) : 0) {}

  BoundPair run(std::span<const NodeId> path) {
    levels_.clear();
    levels_.reserve(path.size() + max_hops_ + 2);
    for (std::size_t k = 0; k < path.size(); ++k) {
      if (!net_.contains(path[k])) {
        throw InvalidInput("path references unknown individual " + std::to_string(path[k]));
      }
      if (std::find(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(k), path[k]) !=
          path.begin() + static_cast<std::ptrdiff_t>(k)) {
        throw InvalidInput("path visits individual " + std::to_string(path[k]) + " twice");
      }
      if (k == 0) {
        push_root(path[0]);
      } else {
        std::size_t usable = 0;
        auto link = net_.contact_starts(path[k], path[k - 1]);
        auto useful = propagate(link, levels_.back().useful, usable);
        push(path[k], link, std::move(useful), usable);
      }
    }
    return eval();
  }

 private:
  struct Level {
    NodeId node = 0;
    std::span<const Seconds> link;  // contacts between node and the previous level
    IntervalSet useful;
    double bound = 1.0;  // sup over infection times of the chain transmission probability
    std::unordered_map<Seconds, double> memo;
  };

  void push_root(NodeId u) {
    Level root;
    root.node = u;
    root.useful = {{std::numeric_limits<Seconds>::min() / 4, t_}};
    levels_.push_back(std::move(root));
  }

  void push(NodeId u, std::span<const Seconds> link, IntervalSet useful, std::size_t usable) {
    Level level;
    level.node = u;
    level.link = link;
    level.bound = levels_.back().bound *
                  (1.0 - std::pow(1.0 - params_.p_inf, static_cast<double>(usable)));
    level.useful = std::move(useful);
    levels_.push_back(std::move(level));
  }

  IntervalSet propagate(std::span<const Seconds> link, const IntervalSet& parent,
                        std::size_t& usable) const {
    IntervalSet out;
    usable = 0;
    for (Seconds s : link) {
      if (s > t_) break;
      if (!covers(parent, s)) continue;
      ++usable;
      const Seconds lo = s - params_.mu_r + 1;
      const Seconds hi = s - params_.mu_is;
      if (!out.empty() && lo <= out.back().second + 1) {
        out.back().second = std::max(out.back().second, hi);
      } else {
        out.emplace_back(lo, hi);
      }
    }
    return out;
  }

  double trans(std::size_t k, Seconds tau) {
    if (k == 0) return 1.0;
    Level& level = levels_[k];
    if (auto it = level.memo.find(tau); it != level.memo.end()) return it->second;
    const Seconds lo = tau + params_.mu_is;
    const Seconds hi = std::min(tau + params_.mu_r, t_ + 1);
    double total = 0.0;
    double survive = 1.0;
    for (auto it = std::lower_bound(level.link.begin(), level.link.end(), lo);
         it != level.link.end() && *it < hi; ++it) {
      total += trans(k - 1, *it) * params_.p_inf * survive;
      survive *= 1.0 - params_.p_inf;
    }
    levels_[k].memo.emplace(tau, total);
    return total;
  }

  bool on_path(NodeId u) const {
    return std::any_of(levels_.begin(), levels_.end(), [u](const Level& l) { return l.node == u; });
  }

  BoundPair eval() {
    const std::size_t k = levels_.size() - 1;
    const NodeId v = levels_[k].node;
    double keep_lower = 1.0;
    double keep_upper = 1.0;
    if (params_.p_inf > 0.0 && k < max_hops_ && !levels_[k].useful.empty()) {
      const auto adjacency = net_.adjacency(v);
      const auto incident = incidence_.of(v);
      std::vector<std::uint32_t> slots;
      for (const auto& [lo, hi] : levels_[k].useful) {
        auto it = std::lower_bound(incident.begin(), incident.end(), Incidence::Entry{lo, 0});
        for (; it != incident.end() && it->start <= hi && it->start <= t_; ++it) slots.push_back(it->slot);
      }
      std::sort(slots.begin(), slots.end());
      slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
      for (std::uint32_t slot : slots) {
        const auto& adj = adjacency[slot];
        if (on_path(adj.node)) continue;
        std::size_t usable = 0;
        auto link = net_.contact_starts(adj);
        auto useful = propagate(link, levels_[k].useful, usable);
        if (useful.empty() || useful.back().second < 0) continue;
        const double bound =
            levels_[k].bound * (1.0 - std::pow(1.0 - params_.p_inf, static_cast<double>(usable)));
        if (bound < options_.prune_below) continue;
        push(adj.node, link, std::move(useful), usable);
        const BoundPair child = eval();
        levels_.pop_back();
        keep_lower *= 1.0 - child.lower;
        keep_upper *= 1.0 - child.upper;
      }
    }
    const double p0 = params_.initial_probability(v);
    const double start = p0 * trans(k, 0);
    BoundPair out;
    out.lower = std::clamp(start + (1.0 - p0) * (1.0 - std::pow(keep_lower, c_l_)), 0.0, 1.0);
    out.upper = std::clamp(start + (1.0 - p0) * (1.0 - std::pow(keep_upper, c_u_)), 0.0, 1.0);
    return out;
  }

  const ContactNetwork& net_;
  const Incidence& incidence_;
  const DiffusionParams& params_;
  const PollSusOptions& options_;
  Seconds t_;
  double c_l_;
  double c_u_;
  std::size_t max_hops_;
  std::vector<Level> levels_;
};

}  // namespace

double calc_prob_transmission(std::span<const NodeId> path, Seconds infected_at,
                              const ContactNetwork& net, const DiffusionParams& params,
                              Seconds horizon) {
  if (path.empty()) throw InvalidInput("path must contain at least one individual");
  return transmission_recursive(path, infected_at, net, params, horizon);
}

BoundPair calc_prob_inf(std::span<const NodeId> path, Seconds t, const ContactNetwork& sample_net,
                        const DiffusionParams& params, const BoundExponents& exponents,
                        const PollSusOptions& options) {
  params.validate();
  if (path.empty()) throw InvalidInput("path must contain at least one individual");
  if (t < 0) throw InvalidInput("evaluation time must be non-negative");
  const Incidence incidence(sample_net);
  PathSearch search(sample_net, incidence, params, exponents, options, t);
  BoundPair out = search.run(path);
  out.upper_guaranteed = exponents.feasible;
  return out;
}

PollSusSeries pollsusceptible_estimate(const ContactNetwork& sample_net,
                                       const DiffusionParams& params, double p_s,
                                       std::span<const Seconds> times,
                                       const PollSusOptions& options) {
  params.validate();
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidInput("p_s must lie in (0, 1]");
  for (Seconds t : times) {
    if (t < 0) throw InvalidInput("evaluation time must be non-negative");
  }
  const double p_min = estimate_p_min(sample_net, params);
  const BoundExponents exponents = compute_exponents(p_s, p_min);

  const auto nodes = sample_net.nodes();
  const Incidence incidence(sample_net);
  std::vector<BoundPair> results(nodes.size() * times.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const NodeId root[1] = {nodes[i]};
    for (std::size_t j = 0; j < times.size(); ++j) {
      PathSearch search(sample_net, incidence, params, exponents, options, times[j]);
      results[i * times.size() + j] = search.run(root);
    }
  });

  PollSusSeries out;
  for (EstimateSeries* s : {&out.lower, &out.upper}) {
    s->times.assign(times.begin(), times.end());
    s->values.assign(times.size(), 0.0);
    s->p_s = p_s;
    s->p_min = exponents.p_min;
    s->c_l = exponents.c_l;
    s->c_u = exponents.c_u;
  }
  out.lower.method = Method::kPollSusLower;
  out.upper.method = Method::kPollSusUpper;
  out.upper.feasible = exponents.feasible;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      out.lower.values[j] += results[i * times.size() + j].lower;
      out.upper.values[j] += results[i * times.size() + j].upper;
    }
  }
  for (double& v : out.lower.values) v /= p_s;
  for (double& v : out.upper.values) v /= p_s;
  return out;
}

}  // namespace spread
