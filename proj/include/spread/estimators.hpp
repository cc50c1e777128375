#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spread/common.hpp"
#include "spread/contact_network.hpp"
#include "spread/diffusion_params.hpp"
#include "spread/mobility.hpp"

namespace spread {

enum class Method { kScale, kDensity, kPollSpreader, kPollSusLower, kPollSusUpper };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// EI_t per evaluation timestamp for one estimator on one sub-sample.
struct EstimateSeries {
  Method method = Method::kScale;
  std::vector<Seconds> times;
  std::vector<double> values;
  double p_s = 1.0;
  std::uint64_t seed = 0;
  bool feasible = true;  // false when the value is not a guaranteed bound
  std::optional<double> p_min;
  std::optional<double> c_l;
  std::optional<double> c_u;
};

// ---------------------------------------------------------------------------
// Scale

/// Monte-Carlo spread inside the sub-sample, scaled by 1/p_s.
EstimateSeries scale_estimate(std::span<const Contact> sample_contacts,
                              std::span<const NodeId> sample_ids, const DiffusionParams& params,
                              double p_s, int runs, std::uint64_t seed,
                              std::span<const Seconds> times);

// ---------------------------------------------------------------------------
// Density

/// Co-location probability of a single unobserved visit landing in the target's
/// cell: p_cell * geometric * p_long_enough.
double colocation_probability(double p_cell, double geometric, double p_long_enough);

/// 1 - (1 - p)^n
double at_least_one(double p, double n);

/// 1 - prod(1 - p_i)
double union_probability(std::span<const double> p);

/// Uniform spatial grid over the sample bounding box, holding visit times and
/// stay intervals per cell so that per-slice counts cost O(log V).
class GridModel {
 public:
  GridModel(std::span<const Trajectory> trajectories, int cells_per_side = 100);

  int cells_per_side() const { return side_; }
  double cell_width() const { return width_; }
  double cell_height() const { return height_; }
  double cell_area() const { return width_ * height_; }
  std::size_t cell_of(const Position& p) const;

  struct SliceCounts {
    double in_cell = 0.0;  // n_{t,i,j} for the queried cell
    double total = 0.0;    // sum over all cells
  };

  /// Observed visits in [begin, end) plus individuals already present at
  /// `begin` (stay started before and ends after it), for one cell and over
  /// the grid. `exclude` removes the target's own visit at `begin`.
  SliceCounts counts(std::size_t cell, Seconds begin, Seconds end, bool exclude_own_visit) const;

  /// p_{t,i,j} for every cell of the slice; all zero when nothing is observed.
  std::vector<double> cell_probabilities(Seconds begin, Seconds end) const;

  /// Mean inter-visit dwell duration across all trajectories (seconds).
  double mean_dwell() const { return mean_dwell_; }

 private:
  struct Cell {
    std::vector<Seconds> visits;
    std::vector<Seconds> stay_starts;
    std::vector<Seconds> stay_ends;
  };
  double count_cell(const Cell& c, Seconds begin, Seconds end) const;

  int side_;
  double min_x_ = 0.0, min_y_ = 0.0, width_ = 1.0, height_ = 1.0;
  std::vector<Cell> cells_;
  Cell all_;
  double mean_dwell_ = 0.0;
};

/// Grid-density baseline. `population` is the whole-population size n.
EstimateSeries density_estimate(std::span<const Trajectory> sample_trajectories,
                                const DiffusionParams& params, double p_s, std::size_t population,
                                std::span<const Seconds> times, int cells_per_side = 100);

// ---------------------------------------------------------------------------
// PollSpreader

/// p_init + (1 - p_init) * (1 - (1 - 1/E|S|)^{e_c})
double pollspreader_probability(double p_init, double expected_susceptible, double cut);

EstimateSeries pollspreader_estimate(const ContactNetwork& sample_net,
                                     const DiffusionParams& params, double p_s,
                                     std::span<const Seconds> times);

// ---------------------------------------------------------------------------
// PollSusceptible

struct BoundExponents {
  double c_l = 1.0;
  std::optional<double> c_u;
  double p_min = 1.0;
  bool feasible = true;

  /// Exponent used for the upper bound; c_l when c_u does not exist.
  double upper_exponent() const { return c_u.value_or(c_l); }
};

inline constexpr double kMinPMin = 1e-12;

BoundExponents compute_exponents(double p_s, double p_min);

/// (1 - p_inf)^{n_max} over the largest per-pair contact count, clamped to >= 1e-12.
double estimate_p_min(const ContactNetwork& sample_net, const DiffusionParams& params);

/// A path <v_0, ..., v_k>: v_k transmits to v_{k-1}, ..., down to v_0.
using Path = std::vector<NodeId>;

/// Probability that the chain delivers the infection to v_0 given v_k was
/// infected at infected_at, using only contacts that start at or before
/// `horizon`.
double calc_prob_transmission(std::span<const NodeId> path, Seconds infected_at,
                              const ContactNetwork& net, const DiffusionParams& params,
                              Seconds horizon = std::numeric_limits<Seconds>::max() / 4);

struct PollSusOptions {
  /// Children whose transmission probability is provably below this value
  /// are dropped. 0 keeps the exact recursion.
  double prune_below = 0.0;
};

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
  bool upper_guaranteed = true;  // false when c_u did not exist
};

/// Lower/upper bounds on P(T_s^t = 1) for the path s, recursing over sampled
/// neighbours of v_k not already on the path, at most floor(t / mu_IS) hops.
BoundPair calc_prob_inf(std::span<const NodeId> path, Seconds t, const ContactNetwork& sample_net,
                        const DiffusionParams& params, const BoundExponents& exponents,
                        const PollSusOptions& options = {});

struct PollSusSeries {
  EstimateSeries lower;
  EstimateSeries upper;
};

PollSusSeries pollsusceptible_estimate(const ContactNetwork& sample_net,
                                       const DiffusionParams& params, double p_s,
                                       std::span<const Seconds> times,
                                       const PollSusOptions& options = {});

}  // namespace spread
