#pragma once

#include <unordered_map>

#include "spread/common.hpp"

namespace spread {

/// SIR-with-latency parameters. An infected individual is INS on
/// [inf, inf + mu_is), IS on [inf + mu_is, inf + mu_r) and R afterwards.
struct DiffusionParams {
  Seconds mu_is = days(5);
  Seconds mu_r = days(12);
  double p_inf = 0.01;
  double p_init = 0.01;
  double d_max = 11.0;       // meters
  Seconds t_min = 15 * 60;
  /// Optional per-individual initial infection probabilities; ids not listed use p_init.
  std::unordered_map<NodeId, double> p_init_by_node;

  double initial_probability(NodeId u) const {
    if (!p_init_by_node.empty()) {
      if (auto it = p_init_by_node.find(u); it != p_init_by_node.end()) return it->second;
    }
    return p_init;
  }

  /// Throws InvalidInput naming the first violated constraint.
  void validate() const;
};

}  // namespace spread
