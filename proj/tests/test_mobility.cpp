#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "spread/mobility.hpp"

using namespace spread;

namespace {

Trajectory traj(NodeId id, std::vector<std::pair<Seconds, Position>> pts, Seconds horizon,
                Presence presence = Presence::kUntilHorizon) {
  std::vector<Visit> v;
  for (auto& [t, p] : pts) v.push_back({id, t, p});
  return build_trajectory(std::move(v), horizon, presence);
}

std::vector<Trajectory> random_walkers(std::uint64_t seed, int n, int visits, Seconds horizon,
                                       double extent) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> xy(0.0, extent);
  std::uniform_int_distribution<Seconds> when(0, horizon - 1);
  std::bernoulli_distribution trunc(0.2);
  std::vector<std::vector<Visit>> per(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) per[static_cast<std::size_t>(i)].push_back({static_cast<NodeId>(i), when(g) / 4, {xy(g), xy(g)}});
  std::uniform_int_distribution<int> who(0, n - 1);
  for (int k = n; k < visits; ++k) {
    const int i = who(g);
    // Snap to a coarse lattice so exact ties and boundary distances occur.
    per[static_cast<std::size_t>(i)].push_back({static_cast<NodeId>(i), when(g) / 60 * 60,
                                                {std::round(xy(g) / 5) * 5, std::round(xy(g) / 5) * 5}});
  }
  std::vector<Trajectory> out;
  for (auto& v : per) {
    out.push_back(build_trajectory(std::move(v), horizon,
                                   trunc(g) ? Presence::kUntilLastVisit : Presence::kUntilHorizon));
  }
  return out;
}

}  // namespace

TEST_CASE("build_trajectory sorts and deduplicates") {
  const Position a{0, 0}, b{5, 5}, c{9, 9};
  auto t = traj(1, {{10, a}, {5, b}, {20, c}}, 100);
  REQUIRE(t.visits().size() == 3);
  CHECK(t.visits()[0].time == 5);
  CHECK(t.visits()[1].time == 10);
  CHECK(t.visits()[2].time == 20);

  auto d = traj(1, {{5, a}, {5, b}}, 100);
  REQUIRE(d.visits().size() == 1);
  CHECK(d.visits()[0].pos == b);
}

TEST_CASE("build_trajectory rejects bad input") {
  CHECK_THROWS_AS(build_trajectory({}, 10), InvalidInput);
  CHECK_THROWS_AS(build_trajectory({{1, 0, {0, 0}}, {2, 1, {0, 0}}}, 10), InvalidInput);
  CHECK_THROWS_AS(build_trajectory({{1, -1, {0, 0}}}, 10), InvalidInput);
  CHECK_THROWS_AS(build_trajectory({{1, 0, {NAN, 0}}}, 10), InvalidInput);
  CHECK_THROWS_AS(build_trajectory({{1, 50, {0, 0}}}, 10), InvalidInput);
}

TEST_CASE("location_at is a right-continuous step function") {
  const Position a{0, 0}, b{1, 1};
  auto t = traj(1, {{0, a}, {100, b}}, 200);
  CHECK(location_at(t, 50) == a);
  CHECK(location_at(t, 100) == b);
  CHECK(location_at(t, 199) == b);
  CHECK_FALSE(location_at(t, 250).has_value());
  CHECK_FALSE(location_at(t, 200).has_value());

  auto late = traj(2, {{30, a}}, 200);
  CHECK_FALSE(location_at(late, 29).has_value());
  CHECK(location_at(late, 30) == a);

  auto trunc = traj(3, {{0, a}, {100, b}}, 200, Presence::kUntilLastVisit);
  CHECK(location_at(trunc, 99) == a);
  CHECK_FALSE(location_at(trunc, 100).has_value());
}

TEST_CASE("location_at matches a naive scan on a day of random visits") {
  std::mt19937_64 g(11);
  std::uniform_int_distribution<Seconds> when(0, 86400);
  std::uniform_real_distribution<double> xy(-100, 100);
  std::vector<Visit> v;
  for (int k = 0; k < 300; ++k) v.push_back({4, when(g), {xy(g), xy(g)}});
  auto t = build_trajectory(v, days(30));
  CHECK(t.horizon_end() == days(30));
  CHECK(std::is_sorted(t.visits().begin(), t.visits().end(),
                       [](const Visit& a, const Visit& b) { return a.time < b.time; }));
  for (Seconds q = 0; q < days(31); q += 997) CHECK(location_at(t, q) == oracle::where(t, q));
}

TEST_CASE("co-present pair forms one contact over the whole horizon") {
  std::vector<Trajectory> ts{traj(0, {{0, {3, 3}}}, 3600), traj(1, {{0, {3, 3}}}, 3600)};
  auto cs = detect_contacts(ts, 11.0, 900);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0] == Contact{0, 1, 0, 3600});
}

TEST_CASE("distant pair has no contacts") {
  std::vector<Trajectory> ts{traj(0, {{0, {0, 0}}, {100, {5, 0}}}, 3600),
                             traj(1, {{0, {22, 0}}, {50, {40, 0}}}, 3600)};
  CHECK(detect_contacts(ts, 11.0, 0).empty());
}

TEST_CASE("boundary distance counts and a brief separation splits intervals") {
  std::vector<Trajectory> ts{traj(0, {{0, {0, 0}}}, 1000),
                             traj(1, {{0, {11, 0}}, {400, {50, 0}}, {401, {0, 0}}}, 1000)};
  const auto iv = detect_colocations(ts, 11.0);
  REQUIRE(iv.size() == 2);
  CHECK(iv[0] == ColocationInterval{0, 1, 0, 400});
  CHECK(iv[1] == ColocationInterval{0, 1, 401, 1000});
  const auto cs = detect_contacts(ts, 11.0, 500);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].start == 401);
}

TEST_CASE("moving within range keeps a single maximal interval") {
  std::vector<Trajectory> ts{traj(0, {{0, {0, 0}}, {100, {8, 0}}, {200, {30, 0}}}, 1000),
                             traj(1, {{0, {5, 0}}, {150, {20, 0}}, {300, {31, 0}}}, 1000)};
  const auto iv = detect_colocations(ts, 11.0);
  REQUIRE(iv.size() == 2);
  CHECK(iv[0] == ColocationInterval{0, 1, 0, 150});
  CHECK(iv[1] == ColocationInterval{0, 1, 200, 1000});
}

TEST_CASE("indexed detection equals the all-pairs scan on random walkers") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    const auto ts = random_walkers(seed, 50, 200, 20000, 120.0);
    CHECK(detect_colocations(ts, 11.0) == oracle::colocations(ts, 11.0));
    CHECK(detect_contacts(ts, 11.0, 900) == oracle::contacts(ts, 11.0, 900));
  }
}

TEST_CASE("contacts are maximal, symmetric and monotone in d_max and t_min") {
  const auto ts = random_walkers(99, 40, 400, 30000, 80.0);
  const auto iv = detect_colocations(ts, 11.0);
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].u == iv[i - 1].u && iv[i].v == iv[i - 1].v) CHECK(iv[i].start > iv[i - 1].end);
  }
  for (const auto& c : iv) CHECK(c.u < c.v);

  auto contains_all = [](const std::vector<Contact>& big, const std::vector<Contact>& small) {
    // Every small-set contact lies within some big-set contact of the same pair.
    for (const auto& s : small) {
      bool found = false;
      for (const auto& b : big) {
        if (b.u == s.u && b.v == s.v && b.start <= s.start && b.end >= s.end) found = true;
      }
      if (!found) return false;
    }
    return true;
  };
  const auto base = detect_contacts(ts, 11.0, 900);
  CHECK(contains_all(detect_contacts(ts, 15.0, 900), base));
  CHECK(contains_all(detect_contacts(ts, 11.0, 300), base));
  CHECK(detect_contacts(ts, 11.0, 300).size() >= base.size());
}

TEST_CASE("restrict_contacts keeps only sampled pairs") {
  std::vector<Contact> cs{{0, 1, 0, 10}, {1, 2, 5, 20}, {0, 2, 7, 30}};
  std::vector<bool> keep{true, false, true};
  const auto r = restrict_contacts(cs, keep);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == Contact{0, 2, 7, 30});
}

TEST_CASE("contact CSV round-trips") {
  std::vector<Contact> cs{{0, 1, 0, 10}, {1, 2, 5, 20}};
  std::stringstream s;
  write_contacts_csv(s, cs);
  CHECK(s.str().rfind("u,v,start_s,end_s\n", 0) == 0);
  CHECK(read_contacts_csv(s) == cs);
}

TEST_CASE("evaluation grid is daily and inclusive") {
  const auto g = evaluation_grid(days(3));
  CHECK(g == std::vector<Seconds>{0, days(1), days(2), days(3)});
  CHECK_THROWS_AS(evaluation_grid(10, 0), InvalidInput);
}
