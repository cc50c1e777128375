#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "spread/common.hpp"

namespace spread {

struct Visit {
  NodeId id = 0;
  Seconds time = 0;
  Position pos;
};

/// How long an individual stays observable after their final visit.
enum class Presence {
  kUntilHorizon,      // hold the last location until horizon_end
  kUntilLastVisit,    // vanish at the final visit time
};

/// Time-ordered visits of one individual. The location is a right-continuous
/// step function: the position of the latest visit at or before t, defined on
/// [first visit, presence_end).
class Trajectory {
 public:
  Trajectory() = default;

  NodeId id() const { return id_; }
  std::span<const Visit> visits() const { return visits_; }
  Seconds horizon_end() const { return horizon_end_; }
  Seconds first_time() const { return visits_.front().time; }
  Seconds presence_end() const { return presence_end_; }

  friend Trajectory build_trajectory(std::vector<Visit> visits, Seconds horizon_end,
                                     Presence presence);

 private:
  NodeId id_ = 0;
  std::vector<Visit> visits_;
  Seconds horizon_end_ = 0;
  Seconds presence_end_ = 0;
};

/// Sorts by time and collapses identical timestamps (the later record in
/// input order wins). Throws InvalidInput on an empty list, mixed ids,
/// negative times, non-finite positions or a horizon before the last visit.
Trajectory build_trajectory(std::vector<Visit> visits, Seconds horizon_end,
                            Presence presence = Presence::kUntilHorizon);

std::optional<Position> location_at(const Trajectory& traj, Seconds t);

/// A maximal interval [start, end) during which u and v are within d_max.
struct ColocationInterval {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  Seconds start = 0;
  Seconds end = 0;

  Seconds duration() const { return end - start; }
  friend bool operator==(const ColocationInterval&, const ColocationInterval&) = default;
};

/// A co-location that lasted at least t_min: one transmission opportunity at `start`.
struct Contact {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  Seconds start = 0;
  Seconds end = 0;

  friend bool operator==(const Contact&, const Contact&) = default;
};

/// Orders by (start, u, v, end); the processing order of the simulator.
bool contact_time_order(const Contact& a, const Contact& b);

/// All maximal co-location intervals, sorted by (u, v, start). Candidate pairs
/// come from a uniform grid of cell width d_max that is updated at every
/// visit event, so only individuals who moved are re-examined.
std::vector<ColocationInterval> detect_colocations(std::span<const Trajectory> trajectories,
                                                   double d_max);

/// Co-locations lasting at least t_min, sorted by contact_time_order.
std::vector<Contact> detect_contacts(std::span<const Trajectory> trajectories, double d_max,
                                     Seconds t_min);

std::vector<Contact> contacts_from_intervals(std::span<const ColocationInterval> intervals,
                                             Seconds t_min);

/// Keeps contacts whose endpoints both satisfy `keep[id]`.
std::vector<Contact> restrict_contacts(std::span<const Contact> contacts,
                                       const std::vector<bool>& keep);

/// CSV with header u,v,start_s,end_s.
void write_contacts_csv(std::ostream& out, std::span<const Contact> contacts);
std::vector<Contact> read_contacts_csv(std::istream& in);

}  // namespace spread
