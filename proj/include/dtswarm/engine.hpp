#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtswarm/avoidance.hpp"
#include "dtswarm/coordinator.hpp"
#include "dtswarm/environment.hpp"
#include "dtswarm/radio.hpp"
#include "dtswarm/swarm.hpp"

namespace dtswarm {

struct PlannerParams {
  /// gbest drift that makes the server replan an active rescue.
  double replan_threshold_m = 15.0;
  std::size_t waypoint_lookahead = 32;

  void validate() const;
};

struct ScenarioConfig {
  std::string map_path;
  Mode mode = Mode::kDT1;
  int n_agents = 20;
  std::uint64_t seed = 1;
  int max_rounds = 3000;
  double convergence_radius_m = 10.0;
  double convergence_fraction = 0.9;
  double sigma_m = 2.0;
  PsoParams pso;
  RadioParams radio;
  AvoidanceParams avoidance;
  PlannerParams planner;

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable map plus radio field, shared by every run of a batch.
struct World {
  WorldMap map;
  RadioField field;
};

std::shared_ptr<const World> make_world(const MapSpec& spec, const RadioParams& radio);

struct RoundRecord {
  int round = 0;
  RoundTraffic traffic;
  long cumulative_uplink = 0;
  long cumulative_downlink = 0;
  long moves = 0;
  int arrived = 0;
  double convergence_fraction = 0.0;
  /// Smallest distance any agent has ever sensed.
  double swarm_best_dist = 0.0;

  bool operator==(const RoundRecord&) const = default;
};

struct RunMetrics {
  Mode mode = Mode::kDT1;
  int n_agents = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  int rounds_used = 0;
  double final_convergence_fraction = 0.0;
  long total_moves = 0;
  long uplink_attempts = 0;
  long uplink_successes = 0;
  long downlink_attempts = 0;
  long downlink_successes = 0;
  long assistance_requests = 0;
  long assistance_grants = 0;
  std::vector<RoundRecord> series;

  long total_transmissions() const { return uplink_attempts + downlink_attempts; }
  bool operator==(const RunMetrics&) const = default;
};

struct ConvergenceStatus {
  double fraction = 0.0;
  bool converged = false;
};

ConvergenceStatus check_convergence(std::span<const AgentState> agents, Vec2 target,
                                    double radius, double fraction);

/// One scenario run, advanced round by round. Deterministic in (config, seed).
class Simulation {
 public:
  Simulation(std::shared_ptr<const World> world, ScenarioConfig config);

  /// Runs one flowchart iteration. Returns false when the run was already finished.
  bool step();
  bool finished() const;
  RunMetrics run();

  const std::vector<AgentState>& agents() const { return agents_; }
  std::vector<AgentState>& mutable_agents() { return agents_; }
  const TwinRegistry& registry() const { return registry_; }
  const CommLedger& ledger() const { return ledger_; }
  const RunMetrics& metrics() const { return metrics_; }
  const ScenarioConfig& config() const { return config_; }
  const World& world() const { return *world_; }
  int round() const { return round_; }

 private:
  void spawn_agents();
  void exchange(const RoundStreams& streams, std::vector<bool>& hold);
  void move_agent(AgentState& agent, const RoundStreams& streams);
  void request_assistance(const RoundStreams& streams);
  void record_round(long moves_before);

  std::shared_ptr<const World> world_;
  ScenarioConfig config_;
  std::vector<AgentState> agents_;
  TwinRegistry registry_;
  CommLedger ledger_;
  RunMetrics metrics_;
  int round_ = 0;
};

/// Validates config, spawns agents and runs to convergence or max_rounds.
RunMetrics run_scenario(std::shared_ptr<const World> world, const ScenarioConfig& config);

struct Stats {
  double mean = 0.0;
  double stdev = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t count = 0;
};

/// Sample mean, sample standard deviation and a two-sided 95% Student-t
/// interval. Empty input gives count 0 and NaN fields.
Stats summarize(std::span<const double> values);

struct MonteCarloResult {
  std::vector<RunMetrics> runs;
  double convergence_rate = 0.0;
  Stats rounds;
  Stats total_moves;
  Stats uplink;
  Stats downlink;
  Stats assistance_requests;
  Stats final_fraction;
};

/// Seed of run i in a batch.
std::uint64_t run_seed(std::uint64_t seed_base, std::uint64_t run_index);

/// Runs `runs` scenarios with seeds run_seed(seed_base, i) on up to `jobs`
/// threads. Results are ordered by run index and independent of `jobs`.
MonteCarloResult monte_carlo(std::shared_ptr<const World> world, const ScenarioConfig& config,
                             int runs, std::uint64_t seed_base, int jobs = 1);

/// Aggregates an existing set of runs.
MonteCarloResult aggregate(std::vector<RunMetrics> runs);

}  // namespace dtswarm
