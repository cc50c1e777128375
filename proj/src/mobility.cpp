#include "spread/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>

namespace spread {

std::vector<Seconds> evaluation_grid(Seconds end, Seconds step) {
  if (step <= 0) throw InvalidInput("evaluation step must be positive");
  std::vector<Seconds> grid;
  for (Seconds t = 0; t <= end; t += step) grid.push_back(t);
  return grid;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

Trajectory build_trajectory(std::vector<Visit> visits, Seconds horizon_end, Presence presence) {
  if (visits.empty()) throw InvalidInput("trajectory needs at least one visit");
  const NodeId id = visits.front().id;
  for (const Visit& v : visits) {
    if (v.id != id) throw InvalidInput("visits of one trajectory must share an individual id");
    if (v.time < 0) throw InvalidInput("visit time must be non-negative");
    if (!v.pos.finite()) throw InvalidInput("visit position must be finite");
  }
  // Stable sort keeps input order among equal timestamps; the last one wins.
  std::stable_sort(visits.begin(), visits.end(),
                   [](const Visit& a, const Visit& b) { return a.time < b.time; });
  std::vector<Visit> unique;
  unique.reserve(visits.size());
  for (const Visit& v : visits) {
    if (!unique.empty() && unique.back().time == v.time) {
      unique.back() = v;
    } else {
      unique.push_back(v);
    }
  }
  if (horizon_end < unique.back().time) {
    throw InvalidInput("horizon_end precedes the last visit");
  }

  Trajectory traj;
  traj.id_ = id;
  traj.visits_ = std::move(unique);
  traj.horizon_end_ = horizon_end;
  traj.presence_end_ =
      presence == Presence::kUntilHorizon ? horizon_end : traj.visits_.back().time;
  return traj;
}

std::optional<Position> location_at(const Trajectory& traj, Seconds t) {
  const auto visits = traj.visits();
  if (visits.empty() || t < visits.front().time || t >= traj.presence_end()) return std::nullopt;
  auto it = std::upper_bound(visits.begin(), visits.end(), t,
                             [](Seconds value, const Visit& v) { return value < v.time; });
  return std::prev(it)->pos;
}

bool contact_time_order(const Contact& a, const Contact& b) {
  return std::tie(a.start, a.u, a.v, a.end) < std::tie(b.start, b.u, b.v, b.end);
}

namespace {

struct Event {
  Seconds time;
  std::uint32_t index;  // trajectory index
  std::int32_t visit;   // visit index, -1 for removal
};

std::uint64_t cell_key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
         static_cast<std::uint32_t>(cy);
}

class SweepIndex {
 public:
  SweepIndex(std::span<const Trajectory> trajectories, double d_max)
      : trajs_(trajectories),
        d_max_(d_max),
        d2_(d_max * d_max),
        present_(trajectories.size(), false),
        pos_(trajectories.size()),
        key_(trajectories.size(), 0),
        slot_(trajectories.size(), 0),
        active_(trajectories.size()) {}

  std::vector<ColocationInterval> run() {
    std::vector<Event> events;
    for (std::uint32_t k = 0; k < trajs_.size(); ++k) {
      const auto visits = trajs_[k].visits();
      const Seconds end = trajs_[k].presence_end();
      for (std::size_t i = 0; i < visits.size() && visits[i].time < end; ++i) {
        events.push_back({visits[i].time, k, static_cast<std::int32_t>(i)});
      }
      if (visits.front().time < end) events.push_back({end, k, -1});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
      return std::tie(a.time, a.index, a.visit) < std::tie(b.time, b.index, b.visit);
    });

    std::vector<std::uint32_t> touched;
    std::size_t i = 0;
    while (i < events.size()) {
      const Seconds now = events[i].time;
      touched.clear();
      for (; i < events.size() && events[i].time == now; ++i) {
        const Event& e = events[i];
        if (present_[e.index]) erase(e.index);
        if (e.visit >= 0) insert(e.index, trajs_[e.index].visits()[e.visit].pos);
        touched.push_back(e.index);
      }
      for (std::uint32_t k : touched) refresh(k, now);
    }
    std::sort(out_.begin(), out_.end(), [](const ColocationInterval& a, const ColocationInterval& b) {
      return std::tie(a.u, a.v, a.start) < std::tie(b.u, b.v, b.start);
    });
    return std::move(out_);
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell_of(const Position& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / d_max_)),
            static_cast<std::int64_t>(std::floor(p.y / d_max_))};
  }

  void insert(std::uint32_t k, const Position& p) {
    const auto [cx, cy] = cell_of(p);
    const auto key = cell_key(cx, cy);
    auto& bucket = cells_[key];
    present_[k] = true;
    pos_[k] = p;
    key_[k] = key;
    slot_[k] = static_cast<std::uint32_t>(bucket.size());
    bucket.push_back(k);
  }

  void erase(std::uint32_t k) {
    auto& bucket = cells_[key_[k]];
    const std::uint32_t last = bucket.back();
    bucket[slot_[k]] = last;
    slot_[last] = slot_[k];
    bucket.pop_back();
    present_[k] = false;
  }

  void neighbours(std::uint32_t k, std::vector<std::uint32_t>& out) const {
    out.clear();
    const auto [cx, cy] = cell_of(pos_[k]);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(cell_key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::uint32_t q : it->second) {
          if (q == k) continue;
          const double ddx = pos_[q].x - pos_[k].x;
          const double ddy = pos_[q].y - pos_[k].y;
          if (ddx * ddx + ddy * ddy <= d2_) out.push_back(q);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

  void close(std::uint32_t a, std::uint32_t b, Seconds start, Seconds now) {
    NodeId u = trajs_[a].id();
    NodeId v = trajs_[b].id();
    if (u > v) std::swap(u, v);
    out_.push_back({u, v, start, now});
  }

  static void drop(std::vector<std::pair<std::uint32_t, Seconds>>& list, std::uint32_t partner) {
    auto it = std::find_if(list.begin(), list.end(),
                           [partner](const auto& e) { return e.first == partner; });
    *it = list.back();
    list.pop_back();
  }

  void refresh(std::uint32_t k, Seconds now) {
    if (present_[k]) {
      neighbours(k, scratch_);
    } else {
      scratch_.clear();
    }
    auto& mine = active_[k];
    for (std::size_t j = 0; j < mine.size();) {
      const auto [partner, start] = mine[j];
      if (!std::binary_search(scratch_.begin(), scratch_.end(), partner)) {
        close(k, partner, start, now);
        drop(active_[partner], k);
        mine[j] = mine.back();
        mine.pop_back();
      } else {
        ++j;
      }
    }
    for (std::uint32_t q : scratch_) {
      const bool known = std::any_of(mine.begin(), mine.end(),
                                     [q](const auto& e) { return e.first == q; });
      if (!known) {
        mine.emplace_back(q, now);
        active_[q].emplace_back(k, now);
      }
    }
  }

  std::span<const Trajectory> trajs_;
  double d_max_;
  double d2_;
  std::vector<bool> present_;
  std::vector<Position> pos_;
  std::vector<std::uint64_t> key_;
  std::vector<std::uint32_t> slot_;
  std::vector<std::vector<std::pair<std::uint32_t, Seconds>>> active_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
  std::vector<std::uint32_t> scratch_;
  std::vector<ColocationInterval> out_;
};

}  // namespace

std::vector<ColocationInterval> detect_colocations(std::span<const Trajectory> trajectories,
                                                   double d_max) {
  if (!(d_max > 0.0) || !std::isfinite(d_max)) throw InvalidInput("d_max must be positive");
  for (const Trajectory& t : trajectories) {
    for (const Visit& v : t.visits()) {
      if (!v.pos.finite()) throw InvalidInput("non-finite coordinates in trajectory");
    }
  }
  return SweepIndex(trajectories, d_max).run();
}

std::vector<Contact> contacts_from_intervals(std::span<const ColocationInterval> intervals,
                                             Seconds t_min) {
  std::vector<Contact> out;
  for (const auto& c : intervals) {
    if (c.duration() >= t_min) out.push_back({c.u, c.v, c.start, c.end});
  }
  std::sort(out.begin(), out.end(), contact_time_order);
  return out;
}

std::vector<Contact> detect_contacts(std::span<const Trajectory> trajectories, double d_max,
                                     Seconds t_min) {
  if (t_min < 0) throw InvalidInput("t_min must be non-negative");
  const auto intervals = detect_colocations(trajectories, d_max);
  return contacts_from_intervals(intervals, t_min);
}

std::vector<Contact> restrict_contacts(std::span<const Contact> contacts,
                                       const std::vector<bool>& keep) {
  std::vector<Contact> out;
  for (const Contact& c : contacts) {
    if (c.u < keep.size() && c.v < keep.size() && keep[c.u] && keep[c.v]) out.push_back(c);
  }
  return out;
}

void write_contacts_csv(std::ostream& out, std::span<const Contact> contacts) {
  out << "u,v,start_s,end_s\n";
  for (const Contact& c : contacts) {
    out << c.u << ',' << c.v << ',' << c.start << ',' << c.end << '\n';
  }
}

std::vector<Contact> read_contacts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("u,v,start_s,end_s", 0) != 0) {
    throw InvalidInput("contact CSV must start with header u,v,start_s,end_s");
  }
  std::vector<Contact> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    Contact c;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> c.u >> c1 >> c.v >> c2 >> c.start >> c3 >> c.end) || c1 != ',' || c2 != ',' ||
        c3 != ',') {
      throw InvalidInput("malformed contact row at line " + std::to_string(line_no));
    }
    if (c.u > c.v) std::swap(c.u, c.v);
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), contact_time_order);
  return out;
}

}  // namespace spread
