// One line per acceptance criterion: "criterion N PASS|FAIL <name>: <detail>".
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spread/contact_network.hpp"
#include "spread/data.hpp"
#include "spread/diffusion.hpp"
#include "spread/estimators.hpp"
#include "spread/experiment.hpp"
#include "spread/random.hpp"

using namespace spread;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

// ---------------------------------------------------------------------------
// Shared synthetic benchmark: 2,000 people over 30 days near 3 contacts per
// person per day.

struct Benchmark {
  Dataset dataset;
  std::vector<Contact> contacts;
  DiffusionParams params;
  double daily = 0.0;
};

const Benchmark& benchmark() {
  static const Benchmark b = [] {
    Benchmark out;
    SyntheticConfig cfg;
    cfg.individuals = 2000;
    cfg.horizon_days = 30;
    cfg.intensity = 1.45;
    out.dataset = generate_synthetic(cfg, 1);
    out.params.p_inf = 0.1;
    out.contacts = detect_contacts(out.dataset.trajectories, out.params.d_max, out.params.t_min);
    out.daily = average_daily_colocations(out.contacts.size(), cfg.individuals,
                                          out.dataset.manifest.horizon_end);
    return out;
  }();
  return b;
}

// ---------------------------------------------------------------------------
// Small-instance exactness

DiffusionParams small_params() {
  DiffusionParams p;
  p.mu_is = 3;
  p.mu_r = 12;
  p.p_inf = 0.4;
  p.p_init = 0.25;
  return p;
}

struct Deviation {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t nodes = 0;
  std::size_t exact_nodes = 0;  // |lower - exact| <= 1e-9
};

void compare_with_enumeration(const std::vector<Contact>& cs, int n, Deviation& dev) {
  const auto ids = oracle::iota_ids(n);
  const auto p = small_params();
  const auto net = ContactNetwork::build(cs, ids, ids.size());
  const auto ex = compute_exponents(1.0, estimate_p_min(net, p));
  for (Seconds t : {5, 15, 25, 39}) {
    const auto exact = enumerate_exact(cs, ids, p, t);
    for (NodeId u : ids) {
      const std::vector<NodeId> root{u};
      const auto b = calc_prob_inf(root, t, net, p, ex);
      const double truth = exact.probability_of(u);
      const double d = std::abs(b.lower - truth);
      dev.lower = std::max(dev.lower, d);
      dev.upper = std::max(dev.upper, std::abs(b.upper - truth));
      ++dev.nodes;
      if (d <= 1e-9) ++dev.exact_nodes;
    }
  }
}

Outcome criterion_1() {
  const auto start = Clock::now();
  std::mt19937_64 g(101);
  Deviation dev;
  int instances = 0, exact_instances = 0;
  for (; instances < 60; ++instances) {
    std::uniform_int_distribution<int> nn(2, 6);
    const int n = nn(g);
    std::uniform_int_distribution<int> mm(n - 1, 8);
    const auto cs = oracle::random_tree(g, n, mm(g), 40);
    const auto before = dev.nodes - dev.exact_nodes;
    compare_with_enumeration(cs, n, dev);
    if (dev.nodes - dev.exact_nodes == before) ++exact_instances;
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = dev.lower <= 1e-9 && elapsed < 60.0;
  o.detail = std::to_string(instances) + " trees, max |lower - exact| = " + fmt(dev.lower) +
             ", exact on " + std::to_string(exact_instances) + "/" + std::to_string(instances) +
             " trees and " + std::to_string(dev.exact_nodes) + "/" + std::to_string(dev.nodes) +
             " node-times, upper bound max deviation " + fmt(dev.upper) + ", " + fmt(elapsed, 3) + " s";
  return o;
}

Outcome criterion_2() {
  std::mt19937_64 g(202);
  Deviation dev;
  int instances = 0, cyclic = 0;
  while (cyclic < 60) {
    std::uniform_int_distribution<int> nn(3, 6), mm(4, 10);
    const int n = nn(g);
    const auto cs = oracle::random_graph(g, n, mm(g), 40);
    ++instances;
    std::set<std::pair<NodeId, NodeId>> edges;
    for (const auto& c : cs) edges.insert({c.u, c.v});
    // A simple graph on the touched nodes has a cycle when edges >= vertices.
    std::set<NodeId> touched;
    for (const auto& e : edges) touched.insert({e.first, e.second});
    if (edges.size() < touched.size()) continue;
    ++cyclic;
    compare_with_enumeration(cs, n, dev);
  }
  Outcome o;
  o.pass = dev.lower <= 0.05;
  o.detail = std::to_string(cyclic) + " graphs with cycles, max |lower - exact| = " + fmt(dev.lower) +
             " (" + std::to_string(dev.exact_nodes) + "/" + std::to_string(dev.nodes) +
             " node-times exact), upper bound max deviation " + fmt(dev.upper);
  return o;
}

// ---------------------------------------------------------------------------
// Bracketing on the benchmark

Outcome criterion_3() {
  const auto start = Clock::now();
  const auto& b = benchmark();
  const auto ids = b.dataset.ids();

  // Smallest p_s at which every draw's sample admits the upper exponent.
  const std::uint64_t seed = 3;
  double chosen = 0.0;
  for (int step = 4; step <= 20 && chosen == 0.0; ++step) {
    const double p_s = step * 0.05;
    bool all = true;
    for (int d = 0; d < 10 && all; ++d) {
      const auto sample = draw_sample(ids, p_s, rng::derive(seed, rng::kDraw, 0, static_cast<std::uint64_t>(d)));
      std::vector<bool> keep(ids.size(), false);
      for (NodeId u : sample.ids) keep[u] = true;
      const auto net = ContactNetwork::build(restrict_contacts(b.contacts, keep), sample.ids, ids.size());
      all = compute_exponents(p_s, estimate_p_min(net, b.params)).feasible;
    }
    if (all) chosen = p_s;
  }
  EvaluationReport report;
  if (chosen > 0.0) {
    ExperimentConfig cfg;
    cfg.params = b.params;
    cfg.p_s_values = {chosen};
    cfg.draws = 10;
    cfg.ground_truth_runs = 5000;
    cfg.methods = {Method::kPollSusLower, Method::kPollSusUpper};
    cfg.master_seed = seed;
    report = run_experiment(b.dataset, b.contacts, cfg);
  }
  if (chosen == 0.0) return {false, "no p_s up to 1 made every draw feasible"};

  const std::size_t T = report.times.size();
  int violations = 0, lower_above = 0, upper_below = 0;
  double worst = 0.0;  // largest violation in units of the draw-mean standard error
  std::string where;
  for (std::size_t j = 0; j < T; ++j) {
    std::vector<double> lo, up;
    for (const auto& d : report.draws) {
      (d.method == Method::kPollSusLower ? lo : up).push_back(d.series->values[j]);
    }
    const double truth = report.truth.mean[j];
    const double ml = mean_of(lo), mu = mean_of(up);
    const double sl = stderr_of(lo), su = stderr_of(up);
    const double vl = ml > truth ? (ml - truth) / std::max(sl, 1e-12) : 0.0;
    const double vu = mu < truth ? (truth - mu) / std::max(su, 1e-12) : 0.0;
    const double v = std::max(vl, vu);
    if (v > worst) {
      worst = v;
      where = "day " + std::to_string(j) + " (lower " + fmt(ml) + ", truth " + fmt(truth) + " +- " +
              fmt(report.truth.stddev[j] / std::sqrt(5000.0), 2) + ", upper " + fmt(mu) + ")";
    }
    if (vl > 1.0) ++lower_above;
    if (vu > 1.0) ++upper_below;
    if (v > 1.0) ++violations;
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = violations == 0 && elapsed < 600.0;
  o.detail = "co-locations/day " + fmt(b.daily, 3) + ", p_s=" + fmt(chosen) + ", c_u exists on all draws, " +
             std::to_string(violations) + "/" + std::to_string(T) + " days outside 1 SE (lower above truth on " +
             std::to_string(lower_above) + ", upper below truth on " + std::to_string(upper_below) +
             "); largest excursion " + fmt(worst, 3) + " SE at " + where + ", " + fmt(elapsed, 3) + " s";
  return o;
}

// ---------------------------------------------------------------------------
// Scale anchoring and underestimation

Outcome criterion_4() {
  const auto& b = benchmark();
  ExperimentConfig cfg;
  cfg.params = b.params;
  cfg.p_s_values = {0.1};
  cfg.draws = 50;
  cfg.ground_truth_runs = 1000;
  cfg.scale_runs = 10;
  cfg.methods = {Method::kScale};
  cfg.master_seed = 4;
  const auto r = run_experiment(b.dataset, b.contacts, cfg);

  auto column = [&](std::size_t j) {
    std::vector<double> v;
    for (const auto& d : r.draws) v.push_back(d.series->values[j]);
    return v;
  };
  const double n = static_cast<double>(r.population);
  const auto at0 = column(0);
  const double z0 = (mean_of(at0) - n * b.params.p_init) / stderr_of(at0);
  const bool anchored = std::abs(z0) <= 3.0;

  const Seconds from = b.params.mu_is + days(2);
  bool decays = true;
  double weakest = 1e300;
  std::size_t checked = 0;
  for (std::size_t j = 0; j < r.times.size(); ++j) {
    if (r.times[j] < from) continue;
    const auto v = column(j);
    const double z = (mean_of(v) - r.truth.mean[j]) / stderr_of(v);
    weakest = std::min(weakest, -z);
    if (!(z < -3.0)) decays = false;
    ++checked;
  }
  Outcome o;
  o.pass = anchored && decays;
  o.detail = "t=0 mean " + fmt(mean_of(at0)) + " vs n*p_init " + fmt(n * b.params.p_init) + " (z=" +
             fmt(z0, 3) + "); bias below -3 SE on " + (decays ? "all " : "not all ") +
             std::to_string(checked) + " days from mu_IS+2d, weakest " + fmt(weakest, 3) + " SE";
  return o;
}

// ---------------------------------------------------------------------------
// MAE ordering

struct Ordering {
  bool holds = true;
  std::string detail;
};

Ordering mae_ordering(const Dataset& ds, std::span<const Contact> contacts, const DiffusionParams& params,
                      std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.params = params;
  cfg.draws = 10;
  cfg.ground_truth_runs = 100;
  cfg.scale_runs = 10;
  cfg.methods = {Method::kScale, Method::kPollSusLower};
  cfg.master_seed = seed;
  const auto r = run_experiment(ds, contacts, cfg);
  Ordering out;
  for (double p_s : cfg.p_s_values) {
    double scale = 0.0, lower = 0.0;
    for (const auto& s : r.summary) {
      if (s.p_s != p_s) continue;
      (s.method == Method::kScale ? scale : lower) = mean_of(s.mae);
    }
    if (!(lower < scale)) out.holds = false;
    out.detail += (out.detail.empty() ? "" : ", ") + fmt(p_s) + ": " + fmt(lower, 3) + " vs " + fmt(scale, 3);
  }
  return out;
}

/// A check-in style proxy: synthetic visits written as tab-separated
/// check-ins and read back through the check-in ingestion path.
Dataset checkin_proxy(std::string& origin) {
  const char* path = std::getenv("SPREAD_CHECKINS");
  IngestOptions opt;
  opt.columns = ColumnMap::checkin();
  Dataset full;
  if (path && *path) {
    origin = std::string("check-ins from ") + path;
    full = ingest_csv_file(path, opt).dataset;
  } else {
    origin = "synthetic check-in proxy (set SPREAD_CHECKINS to use a real check-in file)";
    SyntheticConfig cfg;
    cfg.individuals = 1500;
    cfg.horizon_days = 40;
    cfg.venues = 300;
    cfg.home_spread_m = 20000.0;
    cfg.daily_visit_rate = 1.0;
    cfg.venue_footprint_m = 150.0;
    const auto syn = generate_synthetic(cfg, 11);
    const GeoPoint centre{30.2672, -97.7431};
    const std::int64_t epoch = 1264982400;  // 2010-02-01T00:00:00Z
    std::stringstream tsv;
    for (const auto& tr : syn.trajectories) {
      for (const auto& v : tr.visits()) {
        const double lat = centre.lat + v.pos.y / kMetersPerDegree;
        const double lon = centre.lon + v.pos.x / (kMetersPerDegree * std::cos(centre.lat * M_PI / 180.0));
        const std::time_t when = static_cast<std::time_t>(epoch + v.time);
        std::tm utc{};
        gmtime_r(&when, &utc);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
        tsv << tr.id() << '\t' << stamp << '\t' << std::setprecision(10) << lat << '\t' << lon << "\t0\n";
      }
    }
    full = ingest_csv(tsv, opt).dataset;
  }
  const Seconds length = days(20);
  auto window = slice_window(full, densest_window_start(full.trajectories, length), length);
  if (const char* k = std::getenv("SPREAD_CHECKIN_USERS"); k && window.trajectories.size() > std::stoul(k)) {
    window = select_random(window, std::stoul(k), 5);
  }
  return window;
}

Outcome criterion_5() {
  const auto start = Clock::now();
  const auto& b = benchmark();
  const auto synth = mae_ordering(b.dataset, b.contacts, b.params, 5);

  std::string origin;
  const auto window = checkin_proxy(origin);
  DiffusionParams gw;
  gw.d_max = 110.0;
  gw.p_inf = 0.1;
  const auto cs = detect_contacts(window.trajectories, gw.d_max, gw.t_min);
  const auto checkin = mae_ordering(window, cs, gw, 6);

  Outcome o;
  o.pass = synth.holds && checkin.holds;
  o.detail = "mean MAE lower vs Scale; benchmark [" + synth.detail + "]; " + origin + ", " +
             std::to_string(window.trajectories.size()) + " people, " +
             fmt(average_daily_colocations(cs.size(), window.trajectories.size(), window.manifest.horizon_end), 3) +
             " co-locations/day [" + checkin.detail + "], " + fmt(seconds_since(start), 3) + " s";
  return o;
}

// ---------------------------------------------------------------------------
// Exponent contract

Outcome criterion_6() {
  std::mt19937_64 g(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_residual = 0.0;
  int below_cl = 0, infeasible = 0;
  for (int k = 0; k < 1000; ++k) {
    const double p_s = 0.01 + 0.99 * u(g);
    // ln p_min in [-2 p_s^2, 0] keeps the discriminant non-negative.
    const double log_p = -2.0 * p_s * p_s * u(g);
    const double p_min = std::max(std::exp(log_p), kMinPMin);
    const auto e = compute_exponents(p_s, p_min);
    if (!e.feasible || !e.c_u) {
      ++infeasible;
      continue;
    }
    const double c = *e.c_u;
    const double residual = std::abs(std::log(p_min) / 8.0 * c * c + p_s * c - 1.0);
    worst_residual = std::max(worst_residual, residual);
    if (c < e.c_l || e.c_l != 1.0 / p_s) ++below_cl;
  }
  double worst_limit = 0.0;
  for (double p_s : {0.025, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    const auto e = compute_exponents(p_s, 1.0 - 1e-9);
    worst_limit = std::max(worst_limit, std::abs(e.upper_exponent() - 1.0 / p_s) * p_s);
  }
  Outcome o;
  o.pass = worst_residual <= 1e-12 && below_cl == 0 && infeasible == 0 && worst_limit <= 1e-3;
  o.detail = "1000 feasible pairs, max residual " + fmt(worst_residual, 3) + ", c_u < c_l on " +
             std::to_string(below_cl) + ", infeasible " + std::to_string(infeasible) +
             ", max relative gap at p_min=1-1e-9 " + fmt(worst_limit, 3);
  return o;
}

// ---------------------------------------------------------------------------
// Contact detection

std::vector<Trajectory> random_walkers(std::mt19937_64& g, int n, Seconds horizon) {
  std::uniform_real_distribution<double> coord(0.0, 60.0);
  std::uniform_int_distribution<int> hops(1, 12);
  std::uniform_int_distribution<Seconds> when(0, horizon - 1);
  std::vector<Trajectory> out;
  for (int i = 0; i < n; ++i) {
    std::vector<Visit> v{{static_cast<NodeId>(i), 0, {coord(g), coord(g)}}};
    const int k = hops(g);
    for (int h = 0; h < k; ++h) v.push_back({static_cast<NodeId>(i), when(g), {coord(g), coord(g)}});
    out.push_back(build_trajectory(std::move(v), horizon));
  }
  return out;
}

Outcome criterion_7() {
  std::mt19937_64 g(707);
  int mismatches = 0;
  std::size_t total = 0;
  for (int k = 0; k < 100; ++k) {
    const auto trajs = random_walkers(g, 50, 7200);
    const auto fast = detect_contacts(trajs, 11.0, 300);
    const auto slow = oracle::contacts(trajs, 11.0, 300);
    total += fast.size();
    if (fast != slow) ++mismatches;
  }

  SyntheticConfig cfg;
  cfg.individuals = 20000;
  cfg.horizon_days = 30;
  cfg.intensity = 1.45;
  const auto gen_start = Clock::now();
  const auto big = generate_synthetic(cfg, 7);
  const double gen = seconds_since(gen_start);
  const auto start = Clock::now();
  const auto cs = detect_contacts(big.trajectories, 11.0, 900);
  const double elapsed = seconds_since(start);

  Outcome o;
  o.pass = mismatches == 0 && elapsed < 300.0;
  o.detail = "100 instances of 50 walkers, " + std::to_string(total) + " contacts, " +
             std::to_string(mismatches) + " mismatches; n=20000 month: " + std::to_string(big.manifest.visits) +
             " visits, " + std::to_string(cs.size()) + " contacts in " + fmt(elapsed, 3) + " s (generation " +
             fmt(gen, 3) + " s)";
  return o;
}

// ---------------------------------------------------------------------------
// Simulator invariants

Outcome criterion_8() {
  std::mt19937_64 g(808);
  DiffusionParams base;
  base.mu_is = 3;
  base.mu_r = 10;
  base.p_init = 0.2;
  int instances = 0, conservation = 0, monotone = 0, determinism = 0, coupling = 0, coupling_checks = 0;
  auto check_instance = [&](std::span<const Contact> cs, std::span<const NodeId> ids, DiffusionParams p,
                            std::span<const Seconds> times, int seeds) {
    ++instances;
    for (int s = 0; s < seeds; ++s) {
      const std::uint64_t seed = rng::derive(99, rng::kRun, static_cast<std::uint64_t>(s));
      const auto r = simulate_once(cs, ids, p, seed, times);
      for (Seconds t : times) {
        std::size_t counts[4] = {0, 0, 0, 0};
        for (const auto& h : r.timelines) ++counts[static_cast<int>(h.status_at(t, p))];
        if (counts[0] + counts[1] + counts[2] + counts[3] != ids.size()) ++conservation;
      }
      if (!std::is_sorted(r.cumulative.begin(), r.cumulative.end())) ++monotone;
      const auto again = simulate_once(cs, ids, p, seed, times);
      for (std::size_t k = 0; k < r.timelines.size(); ++k) {
        if (r.timelines[k].infection_time != again.timelines[k].infection_time) {
          ++determinism;
          break;
        }
      }
      std::vector<std::size_t> prev;
      for (double q : {0.05, 0.1, 0.3, 0.6, 1.0}) {
        p.p_inf = q;
        const auto c = simulate_once(cs, ids, p, seed, times).cumulative;
        if (!prev.empty()) {
          ++coupling_checks;
          for (std::size_t j = 0; j < c.size(); ++j) {
            if (c[j] < prev[j]) {
              ++coupling;
              break;
            }
          }
        }
        prev = c;
      }
    }
  };

  std::vector<Seconds> grid;
  for (Seconds t = 0; t < 60; t += 3) grid.push_back(t);
  for (int k = 0; k < 200; ++k) {
    std::uniform_int_distribution<int> nn(3, 12), mm(5, 40);
    const int n = nn(g);
    const auto cs = oracle::random_graph(g, n, mm(g), 60);
    const auto ids = oracle::iota_ids(n);
    check_instance(cs, ids, base, grid, 20);
  }
  const int coupling_small = coupling, checks_small = coupling_checks;
  const auto& b = benchmark();
  const auto ids = b.dataset.ids();
  const auto times = evaluation_grid(b.dataset.manifest.horizon_end);
  check_instance(b.contacts, ids, b.params, times, 10);

  // Monte-Carlo against exhaustive enumeration.
  int mc_outliers = 0, mc_checks = 0;
  double worst_z = 0.0;
  const int runs = 100000;
  for (int k = 0; k < 4; ++k) {
    const int n = 5;
    auto cs = oracle::random_graph(g, n, 9, 30);
    const auto small = oracle::iota_ids(n);
    DiffusionParams p = base;
    p.p_inf = 0.5;
    const Seconds t = 29;
    const auto exact = enumerate_exact(cs, small, p, t);
    std::vector<double> hits(static_cast<std::size_t>(n), 0.0);
    const std::vector<Seconds> at{t};
    for (int r = 0; r < runs; ++r) {
      const auto res = simulate_once(cs, small, p, rng::derive(2024, rng::kRun, static_cast<std::uint64_t>(r)), at);
      for (std::size_t i = 0; i < res.timelines.size(); ++i) hits[i] += res.timelines[i].infected_by(t) ? 1 : 0;
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const double pe = exact.probability[i];
      const double ph = hits[i] / runs;
      const double se = std::sqrt(std::max(pe * (1 - pe), 1e-12) / runs);
      const double z = std::abs(ph - pe) / se;
      worst_z = std::max(worst_z, pe > 0 && pe < 1 ? z : (ph == pe ? 0.0 : 1e9));
      ++mc_checks;
      if (z > 3.0 && !(pe == ph)) ++mc_outliers;
    }
  }

  Outcome o;
  o.pass = conservation == 0 && monotone == 0 && determinism == 0 && coupling == 0 && mc_outliers == 0;
  o.detail = std::to_string(instances) + " instances: conservation " + std::to_string(conservation) +
             ", monotone " + std::to_string(monotone) + ", determinism " + std::to_string(determinism) +
             " failures; p_inf coupling violated in " + std::to_string(coupling_small) + "/" +
             std::to_string(checks_small) + " paired runs on small graphs and " +
             std::to_string(coupling - coupling_small) + "/" + std::to_string(coupling_checks - checks_small) +
             " on the benchmark; 1e5-run means vs enumeration: " +
             std::to_string(mc_outliers) + "/" + std::to_string(mc_checks) + " beyond 3 SE (max " +
             fmt(worst_z, 3) + " SE)";
  return o;
}

// ---------------------------------------------------------------------------
// Cut statistic

Outcome criterion_9() {
  std::mt19937_64 g(909);
  const int n = 300;
  const auto cs = oracle::random_graph(g, n, 3000, days(20));
  const auto ids = oracle::iota_ids(n);
  DiffusionParams p;
  p.p_inf = 0.1;
  p.p_init = 0.1;
  const Seconds t = days(20);
  const auto full_net = ContactNetwork::build(cs, ids, ids.size());
  const double full = cut_statistic_full(full_net, t, p);
  const double p_s = 0.2;
  std::vector<double> est;
  for (int d = 0; d < 1000; ++d) {
    const auto sample = draw_sample(ids, p_s, rng::derive(9, rng::kDraw, 0, static_cast<std::uint64_t>(d)));
    std::vector<bool> keep(ids.size(), false);
    for (NodeId u : sample.ids) keep[u] = true;
    const auto sub = restrict_contacts(cs, keep);
    est.push_back(cut_statistic_sampled(ContactNetwork::build(sub, sample.ids, ids.size()), t, p, p_s));
  }
  const double z = (mean_of(est) - full) / stderr_of(est);
  Outcome o;
  o.pass = std::abs(z) <= 3.0;
  o.detail = "full " + fmt(full, 6) + ", mean of 1000 sampled " + fmt(mean_of(est), 6) + " (z=" + fmt(z, 3) + ")";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"bound recursion exact on trees", criterion_1},
      {"bound recursion error on cyclic graphs", criterion_2},
      {"lower/upper bracketing of ground truth", criterion_3},
      {"Scale anchor at t=0 and later underestimation", criterion_4},
      {"MAE of PollSus lower below Scale", criterion_5},
      {"bound exponent contract", criterion_6},
      {"contact detection equivalence and scale", criterion_7},
      {"simulator invariants", criterion_8},
      {"sampled cut statistic unbiased", criterion_9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << i + 1 << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << '/' << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
