#include <algorithm>
#include <cmath>
#include <numbers>

#include "spread/estimators.hpp"

namespace spread {

double colocation_probability(double p_cell, double geometric, double p_long_enough) {
  return p_cell * geometric * p_long_enough;
}

double at_least_one(double p, double n) {
  if (p <= 0.0 || n <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-p));
}

double union_probability(std::span<const double> p) {
  double miss = 1.0;
  for (double x : p) miss *= 1.0 - x;
  return 1.0 - miss;
}

GridModel::GridModel(std::span<const Trajectory> trajectories, int cells_per_side)
    : side_(cells_per_side) {
  if (side_ < 1) throw InvalidInput("grid needs at least one cell per side");
  double max_x = 0.0, max_y = 0.0;
  bool any = false;
  for (const Trajectory& tr : trajectories) {
    for (const Visit& v : tr.visits()) {
      if (!any) {
        min_x_ = max_x = v.pos.x;
        min_y_ = max_y = v.pos.y;
        any = true;
      }
      min_x_ = std::min(min_x_, v.pos.x);
      min_y_ = std::min(min_y_, v.pos.y);
      max_x = std::max(max_x, v.pos.x);
      max_y = std::max(max_y, v.pos.y);
    }
  }
  width_ = std::max(max_x - min_x_, 1.0) / side_;
  height_ = std::max(max_y - min_y_, 1.0) / side_;
  cells_.resize(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_));

  double dwell_sum = 0.0;
  std::size_t dwell_count = 0;
  double presence_sum = 0.0;
  std::size_t presence_count = 0;
  for (const Trajectory& tr : trajectories) {
    const auto visits = tr.visits();
    for (std::size_t i = 0; i < visits.size(); ++i) {
      const bool last = i + 1 == visits.size();
      const Seconds begin = visits[i].time;
      const Seconds end = last ? tr.presence_end() : visits[i + 1].time;
      Cell& cell = cells_[cell_of(visits[i].pos)];
      cell.visits.push_back(begin);
      all_.visits.push_back(begin);
      if (end > begin) {
        cell.stay_starts.push_back(begin);
        cell.stay_ends.push_back(end);
        all_.stay_starts.push_back(begin);
        all_.stay_ends.push_back(end);
      }
      if (!last) {
        dwell_sum += static_cast<double>(end - begin);
        ++dwell_count;
      } else if (end > begin) {
        presence_sum += static_cast<double>(end - begin);
        ++presence_count;
      }
    }
  }
  if (dwell_count > 0) {
    mean_dwell_ = dwell_sum / static_cast<double>(dwell_count);
  } else if (presence_count > 0) {
    mean_dwell_ = presence_sum / static_cast<double>(presence_count);
  }

  auto finish = [](Cell& c) {
    std::sort(c.visits.begin(), c.visits.end());
    std::sort(c.stay_starts.begin(), c.stay_starts.end());
    std::sort(c.stay_ends.begin(), c.stay_ends.end());
  };
  for (Cell& c : cells_) finish(c);
  finish(all_);
}

std::size_t GridModel::cell_of(const Position& p) const {
  auto index = [this](double v, double lo, double w) {
    const double k = std::floor((v - lo) / w);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(side_ - 1)));
  };
  return index(p.y, min_y_, height_) * static_cast<std::size_t>(side_) + index(p.x, min_x_, width_);
}

double GridModel::count_cell(const Cell& c, Seconds begin, Seconds end) const {
  const auto arrivals = count_in_window(c.visits, begin, end);
  const auto started = std::lower_bound(c.stay_starts.begin(), c.stay_starts.end(), begin) -
                       c.stay_starts.begin();
  const auto left = std::upper_bound(c.stay_ends.begin(), c.stay_ends.end(), begin) -
                    c.stay_ends.begin();
  return static_cast<double>(arrivals) + static_cast<double>(started - left);
}

GridModel::SliceCounts GridModel::counts(std::size_t cell, Seconds begin, Seconds end,
                                         bool exclude_own_visit) const {
  const double own = exclude_own_visit ? 1.0 : 0.0;
  SliceCounts out;
  out.in_cell = std::max(0.0, count_cell(cells_.at(cell), begin, end) - own);
  out.total = std::max(0.0, count_cell(all_, begin, end) - own);
  return out;
}

std::vector<double> GridModel::cell_probabilities(Seconds begin, Seconds end) const {
  std::vector<double> out(cells_.size(), 0.0);
  const double total = count_cell(all_, begin, end);
  if (total <= 0.0) return out;
  for (std::size_t c = 0; c < cells_.size(); ++c) out[c] = count_cell(cells_[c], begin, end) / total;
  return out;
}

EstimateSeries density_estimate(std::span<const Trajectory> sample_trajectories,
                                const DiffusionParams& params, double p_s, std::size_t population,
                                std::span<const Seconds> times, int cells_per_side) {
  params.validate();
  if (!(p_s > 0.0 && p_s <= 1.0)) throw InvalidInput("p_s must lie in (0, 1]");
  if (sample_trajectories.empty()) throw InvalidInput("Density needs a non-empty sub-sample");
  if (population < sample_trajectories.size()) {
    throw InvalidInput("population size is smaller than the sub-sample");
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw InvalidInput("evaluation timestamps must be ascending");
  }

  const GridModel grid(sample_trajectories, cells_per_side);
  const double geometric =
      std::min(1.0, std::numbers::pi * params.d_max * params.d_max / grid.cell_area());
  const double dwell = grid.mean_dwell();
  const double p_long =
      dwell > 0.0 ? std::exp(-static_cast<double>(params.t_min) / dwell) : (params.t_min == 0 ? 1.0 : 0.0);
  const double n = static_cast<double>(population);

  EstimateSeries out;
  out.method = Method::kDensity;
  out.times.assign(times.begin(), times.end());
  out.p_s = p_s;
  out.values.reserve(times.size());

  auto expected_infected = [&](Seconds tau) {
    if (tau < 0) return 0.0;
    const auto done = out.values.size();
    const auto k = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(done), tau) -
        times.begin());
    if (k <= 1) return n * params.p_init;
    return out.values[k - 1];
  };

  const std::size_t users = sample_trajectories.size();
  std::vector<std::size_t> next_slice(users, 0);
  std::vector<double> miss(users, 1.0);

  for (Seconds t : times) {
    double sum = 0.0;
    for (std::size_t u = 0; u < users; ++u) {
      const Trajectory& tr = sample_trajectories[u];
      const auto visits = tr.visits();
      while (next_slice[u] < visits.size() && visits[next_slice[u]].time <= t) {
        const std::size_t i = next_slice[u]++;
        const Seconds begin = visits[i].time;
        const Seconds end = i + 1 < visits.size() ? visits[i + 1].time : tr.presence_end();
        const auto c = grid.counts(grid.cell_of(visits[i].pos), begin, std::max(end, begin + 1), true);
        if (c.total <= 0.0) continue;
        const double spreading = std::max(
            0.0, expected_infected(begin - params.mu_is) - expected_infected(begin - params.mu_r));
        const double p_c = colocation_probability(c.in_cell / c.total, geometric, p_long);
        const double visits_by_spreading = spreading * c.total / (p_s * n);
        miss[u] *= 1.0 - at_least_one(params.p_inf * p_c, visits_by_spreading);
      }
      const double p0 = params.initial_probability(tr.id());
      sum += p0 + (1.0 - p0) * (1.0 - miss[u]);
    }
    out.values.push_back(sum / p_s);
  }
  return out;
}

}  // namespace spread
