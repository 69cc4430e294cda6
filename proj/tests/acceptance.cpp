// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.
//
// Usage: acceptance [--runs N] [--jobs N] [--out DIR]

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"

#include "dtswarm/config.hpp"
#include "dtswarm/engine.hpp"
#include "dtswarm/planner.hpp"
#include "dtswarm/sweep.hpp"

using namespace dtswarm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << "  "
            << o.detail << std::endl;
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string ci(const Stats& s) {
  return fmt("%.1f", s.mean) + " [" + fmt("%.1f", s.ci_low) + ", " + fmt("%.1f", s.ci_high) + "]";
}

/// Plant geometry with a clean channel everywhere.
std::shared_ptr<World> clean_plant(const MapSpec& plant) { return testing::uniform_world(plant, 0.0); }

Outcome accounting(const MapSpec& plant) {
  const auto world = clean_plant(plant);
  ScenarioConfig c;
  c.n_agents = 10;
  Outcome o;
  c.mode = Mode::kP2P;
  Simulation p2p(world, c);
  p2p.step();
  const RoundTraffic p = p2p.ledger().totals();
  c.mode = Mode::kDT1;
  Simulation dt(world, c);
  dt.step();
  const RoundTraffic d = dt.ledger().totals();
  o.pass = p.uplink_attempts + p.downlink_attempts == 90 && d.uplink_attempts == 10 &&
           d.downlink_attempts == 10 && d.uplink_successes == 10 && d.downlink_successes == 10;
  o.detail = "P2P=" + std::to_string(p.uplink_attempts + p.downlink_attempts) + " (want 90), DT1 up=" +
             std::to_string(d.uplink_attempts) + " down=" + std::to_string(d.downlink_attempts) +
             " (want 10/10)";
  return o;
}

Outcome retry_parity(const MapSpec& plant) {
  Outcome o;
  std::ostringstream detail;
  for (int n : {10, 20, 40}) {
    auto world = clean_plant(plant);
    ScenarioConfig c;
    c.mode = Mode::kDT2;
    c.n_agents = n;
    c.seed = 7;
    Simulation sim(world, c);
    // Pin agent 0 in a dead cell that no other agent shares.
    const Cell dead = world->map.cell_of(sim.agents()[0].pos);
    for (std::size_t i = 1; i < sim.agents().size(); ++i) {
      if (world->map.cell_of(sim.agents()[i].pos) == dead) {
        sim.mutable_agents()[i].pos = world->map.target();
      }
    }
    world->field.set_per(dead, 1.0);
    const long expected_up = 1 + (n - 2);

    // One full engine round, then many bare exchange rounds with the agent
    // held in place.
    sim.step();
    const RoundTraffic first = sim.ledger().rounds().back();
    bool ok = first.uplink_attempts - (n - 1) == expected_up && first.downlink_attempts == n - 1;

    TwinRegistry reg(n);
    std::vector<AgentState> agents = sim.agents();
    for (auto& a : agents) a.mode = AgentMode::kPso;
    for (int round = 1; round <= 200 && ok; ++round) {
      CommLedger ledger;
      ledger.begin_round();
      const auto results = dt_exchange(agents, reg, world->field, ledger, Mode::kDT2, {99, round});
      const RoundTraffic& t = ledger.totals();
      ok = t.uplink_attempts - (n - 1) == expected_up && t.downlink_attempts == n - 1 &&
           results[0].status == LinkStatus::kFailed;
    }
    detail << "n=" << n << ": " << (first.uplink_attempts - (n - 1)) << " up/0 down (want "
           << expected_up << ") ";
    o.pass = o.pass && ok;
  }
  o.detail = detail.str();
  return o;
}

Outcome planner_oracle() {
  RandomStream rng(20240101);
  Outcome o;
  int solved = 0, unreachable = 0, mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const WorldMap map = testing::random_wall_map(rng);
    Vec2 from, to;
    do from = {rng.uniform(0, 250), rng.uniform(0, 250)}; while (!is_free(map, from));
    do to = {rng.uniform(0, 250), rng.uniform(0, 250)}; while (!is_free(map, to));
    const auto path = plan(map, from, to);
    const auto oracle = testing::dijkstra(map, map.cell_of(from), map.cell_of(to));
    if (path.has_value() != oracle.reachable()) {
      ++mismatches;
      continue;
    }
    if (!path) {
      ++unreachable;
      continue;
    }
    ++solved;
    const bool admissible = testing::octile_within(map.cell_of(from), map.cell_of(to),
                                                   path->orthogonal_steps, path->diagonal_steps);
    if (path->orthogonal_steps != oracle.orthogonal || path->diagonal_steps != oracle.diagonal ||
        path->total_cost != oracle.meters || !admissible) {
      ++mismatches;
    }
  }
  o.pass = mismatches == 0;
  o.detail = std::to_string(solved) + " solved, " + std::to_string(unreachable) + " unreachable, " +
             std::to_string(mismatches) + " mismatches";
  return o;
}

Outcome p2p_equivalence(const MapSpec& plant) {
  const auto world = clean_plant(plant);
  Outcome o;
  long rounds_checked = 0, mismatches = 0;
  for (int n = 2; n <= 8; ++n) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ScenarioConfig c;
      c.mode = Mode::kP2P;
      c.n_agents = n;
      c.seed = seed;
      c.max_rounds = 300;
      Simulation sim(world, c);
      while (sim.step()) {
        ++rounds_checked;
        const BestRecord server = compute_gbest(sim.registry());
        for (const auto& a : sim.agents()) {
          if (!a.gbest_view || !(*a.gbest_view == server)) ++mismatches;
        }
      }
    }
  }
  o.pass = mismatches == 0 && rounds_checked > 0;
  o.detail = std::to_string(rounds_checked) + " rounds, " + std::to_string(mismatches) + " mismatching views";
  return o;
}

Outcome pso_sanity(int jobs) {
  const auto world = testing::uniform_world(testing::open_spec(), 0.0);
  ScenarioConfig c;
  c.mode = Mode::kDT1;
  c.n_agents = 20;
  c.sigma_m = 0.0;
  c.max_rounds = 500;
  c.convergence_fraction = 0.9;
  c.convergence_radius_m = 10.0;
  const MonteCarloResult mc = monte_carlo(world, c, 100, 2024, jobs);
  int regressions = 0;
  for (const auto& run : mc.runs) {
    for (std::size_t k = 1; k < run.series.size(); ++k) {
      if (run.series[k].swarm_best_dist > run.series[k - 1].swarm_best_dist) ++regressions;
    }
  }
  Outcome o;
  o.pass = mc.convergence_rate >= 0.95 && regressions == 0;
  o.detail = "converged " + fmt("%.2f", mc.convergence_rate) + " of 100 (want >= 0.95), mean rounds " +
             fmt("%.1f", mc.rounds.mean) + ", " + std::to_string(regressions) + " min-distance regressions";
  return o;
}

Outcome determinism(const std::shared_ptr<const World>& world, const std::filesystem::path& root) {
  ScenarioConfig scenario;
  scenario.max_rounds = 800;
  SweepSpec sweep;
  sweep.modes = {Mode::kP2P, Mode::kDT1, Mode::kDT2, Mode::kRW1, Mode::kRW2};
  sweep.agents = {10, 20};
  sweep.runs = 2;
  sweep.seed_base = 4242;
  SweepOptions opts;
  const auto a = root / "determinism_jobs1";
  const auto b = root / "determinism_jobs8";
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  sweep.out = a.string();
  opts.jobs = 1;
  run_sweep(world, scenario, sweep, opts);
  sweep.out = b.string();
  opts.jobs = 8;
  run_sweep(world, scenario, sweep, opts);
  Outcome o;
  std::vector<std::string> differing;
  for (const char* f : {"summary.csv", "timeseries.csv"}) {
    const std::string x = testing::slurp(a / f);
    if (x.empty() || x != testing::slurp(b / f)) differing.push_back(f);
  }
  // The echoed config records its own output directory; compare the rest.
  auto ca = nlohmann::json::parse(testing::slurp(a / "effective_config.json"));
  auto cb = nlohmann::json::parse(testing::slurp(b / "effective_config.json"));
  ca["sweep"].erase("out");
  cb["sweep"].erase("out");
  if (ca != cb) differing.push_back("effective_config.json");
  o.pass = differing.empty();
  o.detail = o.pass ? "summary.csv and timeseries.csv byte-identical for jobs 1 and 8" : "differs:";
  for (const auto& d : differing) o.detail += " " + d;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int runs = 50;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::filesystem::path out = "acceptance_out";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--runs") runs = std::atoi(argv[i + 1]);
    else if (flag == "--jobs") jobs = std::atoi(argv[i + 1]);
    else if (flag == "--out") out = argv[i + 1];
    else {
      std::cerr << "unknown flag " << flag << "\n";
      return 2;
    }
  }
  std::filesystem::create_directories(out);

  const MapSpec plant = load_map_spec(testing::source_dir() / "maps" / "plant.json");
  ScenarioConfig scenario;
  scenario.map_path = "maps/plant.json";
  const auto world = make_world(plant, scenario.radio);

  report(1, "accounting exactness", accounting(plant));
  report(2, "retry parity", retry_parity(plant));

  // Desk-scale sweep shared by criteria 3 to 6.
  const std::vector<int> sizes{10, 20, 40};
  SweepSpec sweep;
  sweep.modes = {Mode::kP2P, Mode::kDT1, Mode::kDT2, Mode::kRW1, Mode::kRW2};
  sweep.agents = sizes;
  sweep.runs = runs;
  sweep.seed_base = 1;
  sweep.out = (out / "sweep").string();
  std::map<std::pair<Mode, int>, std::vector<RunMetrics>> results;
  long downlink_violations = 0, rounds_checked = 0;
  SweepOptions opts;
  opts.jobs = jobs;
  opts.on_run = [&](const RunMetrics& m, int) {
    if (m.mode == Mode::kDT1 || m.mode == Mode::kDT2) {
      for (const RoundRecord& r : m.series) {
        ++rounds_checked;
        if (r.cumulative_downlink > r.cumulative_uplink) ++downlink_violations;
      }
    }
    RunMetrics slim = m;
    slim.series.clear();
    results[{m.mode, m.n_agents}].push_back(std::move(slim));
  };
  std::cout << "sweep: 5 modes x n in {10, 20, 40} x " << runs << " runs, jobs=" << jobs << std::endl;
  run_sweep(world, scenario, sweep, opts);

  const auto stat = [&](Mode mode, int n, auto field, bool converged_only = false) {
    std::vector<double> v;
    for (const auto& r : results[{mode, n}]) {
      if (converged_only && r.final_convergence_fraction < 0.9) continue;
      v.push_back(static_cast<double>(field(r)));
    }
    return summarize(v);
  };
  const auto rate = [&](Mode mode, int n) { return aggregate(results[{mode, n}]).convergence_rate; };
  const auto up = [](const RunMetrics& r) { return r.uplink_attempts; };
  const auto down = [](const RunMetrics& r) { return r.downlink_attempts; };
  const auto total = [](const RunMetrics& r) { return r.total_transmissions(); };
  const auto moves = [](const RunMetrics& r) { return r.total_moves; };

  {
    Outcome o;
    o.pass = downlink_violations == 0 && rounds_checked > 0;
    o.detail = std::to_string(rounds_checked) + " DT1/DT2 rounds, " + std::to_string(downlink_violations) +
               " with cumulative downlink > uplink";
    report(3, "downlink bound", o);
  }
  {
    Outcome o;
    std::ostringstream d;
    for (int n : sizes) {
      const Stats u1 = stat(Mode::kDT1, n, up), u2 = stat(Mode::kDT2, n, up);
      const Stats d1 = stat(Mode::kDT1, n, down), d2 = stat(Mode::kDT2, n, down);
      const bool ok = u2.mean > u1.mean && u2.ci_low > u1.ci_high && d2.mean < d1.mean && d2.ci_high < d1.ci_low;
      o.pass = o.pass && ok;
      d << "n=" << n << " up DT2 " << ci(u2) << " vs DT1 " << ci(u1) << ", down DT2 " << ci(d2) << " vs DT1 "
        << ci(d1) << (ok ? "" : " <- fails") << "; ";
    }
    o.detail = d.str();
    report(4, "mode-2 traffic split", o);
  }
  {
    Outcome o;
    std::ostringstream d;
    for (int n : sizes) {
      const Stats tp = stat(Mode::kP2P, n, total, true), t1 = stat(Mode::kDT1, n, total, true);
      const Stats mp = stat(Mode::kP2P, n, moves, true), m1 = stat(Mode::kDT1, n, moves, true);
      const bool enough = tp.count >= 2 && t1.count >= 2;
      const bool traffic_ok = enough && tp.mean > 3.0 * t1.mean;
      const bool moves_ok = enough && mp.mean > m1.mean && mp.ci_low > m1.ci_high;
      o.pass = o.pass && traffic_ok && moves_ok;
      d << "n=" << n << " (converged P2P " << tp.count << ", DT1 " << t1.count << ") tx P2P/DT1 "
        << fmt("%.1f", tp.mean / t1.mean) << "x" << (traffic_ok ? "" : " <- fails") << ", moves P2P " << ci(mp)
        << " vs DT1 " << ci(m1) << (moves_ok ? "" : " <- fails") << "; ";
    }
    o.detail = d.str();
    report(5, "DT vs P2P efficiency", o);
  }
  {
    const double rw1 = rate(Mode::kRW1, 40), dt1 = rate(Mode::kDT1, 40);
    const double ratio = stat(Mode::kRW1, 40, up).mean / stat(Mode::kDT1, 40, up).mean;
    Outcome o;
    o.pass = rw1 < 0.9 && dt1 >= 0.9 && ratio > 2.0;
    o.detail = "n=40 convergence RW1 " + fmt("%.2f", rw1) + " (want < 0.9), DT1 " + fmt("%.2f", dt1) +
               " (want >= 0.9), uplink RW1/DT1 " + fmt("%.2f", ratio) + " (want > 2)";
    report(6, "random-walk degradation", o);
  }
  std::cout << "convergence rates:";
  for (Mode m : sweep.modes) {
    for (int n : sizes) std::cout << " " << to_string(m) << "/" << n << "=" << fmt("%.2f", rate(m, n));
  }
  std::cout << std::endl;

  report(7, "planner oracle", planner_oracle());
  report(8, "perfect-channel equivalence", p2p_equivalence(plant));
  report(9, "PSO sanity", pso_sanity(jobs));
  report(10, "determinism", determinism(world, out));

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
