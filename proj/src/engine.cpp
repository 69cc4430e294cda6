#include "dtswarm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace dtswarm {

void PlannerParams::validate() const {
  if (!(replan_threshold_m >= 0.0)) throw std::invalid_argument("planner.replan_threshold_m >= 0");
  if (waypoint_lookahead < 1) throw std::invalid_argument("planner.waypoint_lookahead >= 1");
}

void ScenarioConfig::validate() const {
  if (n_agents < 1) throw ConfigError("n_agents >= 1");
  if (max_rounds < 1) throw ConfigError("max_rounds >= 1");
  if (!(convergence_fraction > 0.0 && convergence_fraction <= 1.0)) {
    throw ConfigError("0 < convergence_fraction <= 1");
  }
  if (!(convergence_radius_m > 0.0)) throw ConfigError("convergence_radius_m > 0");
  if (!(sigma_m >= 0.0)) throw ConfigError("sigma_m >= 0");
  try {
    pso.validate();
    radio.validate();
    avoidance.validate();
    planner.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::shared_ptr<const World> make_world(const MapSpec& spec, const RadioParams& radio) {
  auto world = std::make_shared<World>();
  world->map = build_map(spec);
  world->field = compute_field(world->map, radio);
  return world;
}

ConvergenceStatus check_convergence(std::span<const AgentState> agents, Vec2 target,
                                    double radius, double fraction) {
  if (!(radius > 0.0)) throw std::invalid_argument("convergence radius must be positive");
  if (agents.empty()) return {};
  const auto inside = std::count_if(agents.begin(), agents.end(), [&](const AgentState& a) {
    return distance(a.pos, target) <= radius;
  });
  ConvergenceStatus s;
  s.fraction = static_cast<double>(inside) / static_cast<double>(agents.size());
  s.converged = s.fraction >= fraction;
  return s;
}

Simulation::Simulation(std::shared_ptr<const World> world, ScenarioConfig config)
    : world_(std::move(world)), config_(std::move(config)), registry_(config_.n_agents) {
  config_.validate();
  metrics_.mode = config_.mode;
  metrics_.n_agents = config_.n_agents;
  metrics_.seed = config_.seed;
  spawn_agents();
  const auto status = check_convergence(agents_, world_->map.target(),
                                        config_.convergence_radius_m, config_.convergence_fraction);
  metrics_.final_convergence_fraction = status.fraction;
  metrics_.converged = status.converged;
}

void Simulation::spawn_agents() {
  const WorldMap& map = world_->map;
  const auto& cells = map.spawn_cells();
  RandomStream rng(derive_seed(config_.seed, static_cast<std::uint64_t>(StreamPurpose::kSpawn)));
  agents_.resize(static_cast<std::size_t>(config_.n_agents));
  for (int i = 0; i < config_.n_agents; ++i) {
    AgentState& a = agents_[static_cast<std::size_t>(i)];
    a.id = i;
    const Cell c = cells[rng.below(cells.size())];
    a.pos = {(c.col + rng.uniform()) * map.cell_size(), (c.row + rng.uniform()) * map.cell_size()};
    a.pos = map.clamp(a.pos);
    a.pbest_pos = a.pos;
  }
}

bool Simulation::finished() const {
  return metrics_.converged || round_ >= config_.max_rounds;
}

bool Simulation::step() {
  if (finished()) return false;
  ++round_;
  const RoundStreams streams{config_.seed, round_};
  ledger_.begin_round();
  long moves_before = 0;
  for (const auto& a : agents_) moves_before += a.moves;

  for (auto& a : agents_) {
    if (a.mode == AgentMode::kArrived) continue;
    RandomStream rng = streams(a.id, StreamPurpose::kSense);
    observe_distance(a, sense_distance(a.pos, world_->map.target(), config_.sigma_m, rng));
  }

  std::vector<bool> hold(agents_.size(), false);
  exchange(streams, hold);

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    AgentState& a = agents_[i];
    if (a.mode == AgentMode::kArrived) continue;
    const Vec2 gbest = a.gbest_view ? a.gbest_view->pos : a.pbest_pos;
    escape_gbest_stagnation(a, gbest, config_.pso.stagnation_radius, world_->map.target(),
                            config_.convergence_radius_m);
    if (a.mode == AgentMode::kArrived) {
      if (uses_server(config_.mode)) registry_.mark_arrived(a.id);
      continue;
    }
    if (hold[i]) continue;
    move_agent(a, streams);
  }

  request_assistance(streams);
  record_round(moves_before);
  return true;
}

void Simulation::exchange(const RoundStreams& streams, std::vector<bool>& hold) {
  std::vector<ExchangeResult> results;
  if (config_.mode == Mode::kP2P) {
    results = p2p_exchange(agents_, world_->field, ledger_, streams);
    // Without a server the registry is only an observer: it sees every report
    // and is used for metrics and equivalence checks, never for decisions.
    registry_.begin_round();
    for (const auto& a : agents_) registry_.record(a.id, a.pos, a.last_sensed_dist, streams.round);
  } else {
    results = dt_exchange(agents_, registry_, world_->field, ledger_, config_.mode, streams);
  }

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    AgentState& a = agents_[i];
    const ExchangeResult& r = results[i];
    if (config_.mode == Mode::kP2P) a.gbest_view = r.gbest;
    if (a.mode == AgentMode::kArrived || r.status == LinkStatus::kSkipped) continue;

    if (r.status == LinkStatus::kSuccess) {
      a.gbest_view = r.gbest;
      if (a.mode == AgentMode::kRandomWalk && a.walk_reason == WalkReason::kCommFailure) {
        a.mode = AgentMode::kPso;
      }
      if (a.mode == AgentMode::kRescueFollow && has_obstacle_twin(config_.mode) && a.rescue &&
          distance(a.gbest_view->pos, a.rescue->goal) > config_.planner.replan_threshold_m) {
        // The new path rides on the downlink that was just delivered.
        auto path = plan(world_->map, a.pos, a.gbest_view->pos);
        if (path) {
          a.rescue = RescuePlan{std::move(*path), a.gbest_view->pos, 0};
        } else {
          a.rescue.reset();
          a.mode = AgentMode::kPso;
        }
      }
      continue;
    }

    // Lost link. An agent on a rescue path keeps following its waypoints.
    if (a.mode == AgentMode::kRescueFollow) continue;
    const bool walking = a.mode == AgentMode::kRandomWalk;
    if (retries_on_failure(config_.mode) && !walking) hold[i] = true;
    a.mode = AgentMode::kRandomWalk;
    a.walk_reason = WalkReason::kCommFailure;
  }
}

void Simulation::move_agent(AgentState& a, const RoundStreams& streams) {
  const WorldMap& map = world_->map;
  RandomStream rng = streams(a.id, StreamPurpose::kMotion);
  switch (a.mode) {
    case AgentMode::kPso: {
      const Vec2 gbest = a.gbest_view ? a.gbest_view->pos : a.pbest_pos;
      apply_move(a, pso_step(a, gbest, config_.pso, rng), map);
      break;
    }
    case AgentMode::kRandomWalk: {
      const WalkProposal w =
          random_walk_step(a, map, config_.avoidance, config_.pso.random_walk_step, rng);
      if (w.proposal) apply_move(a, *w.proposal, map);
      if (a.walk_reason != WalkReason::kCommFailure) a.mode = AgentMode::kPso;
      break;
    }
    case AgentMode::kRescueFollow: {
      if (!a.rescue) {
        a.mode = AgentMode::kPso;
        break;
      }
      RescuePlan& r = *a.rescue;
      const auto wp = next_waypoint(map, r.path, a.pos, config_.pso.v_max, r.progress,
                                    config_.planner.waypoint_lookahead);
      const MoveOutcome outcome = wp ? apply_move(a, wp->point, map) : MoveOutcome::kStayed;
      if (outcome == MoveOutcome::kMoved &&
          distance(a.pos, r.path.points[wp->path_index]) < 1e-9) {
        r.progress = wp->path_index;
      }
      if (outcome == MoveOutcome::kStayed || r.progress + 1 >= r.path.points.size()) {
        a.rescue.reset();
        a.mode = AgentMode::kPso;
      }
      break;
    }
    case AgentMode::kArrived:
      break;
  }
}

void Simulation::request_assistance(const RoundStreams& streams) {
  for (auto& a : agents_) {
    if (a.mode == AgentMode::kArrived || !detect_stuck(a, config_.pso)) continue;
    if (has_obstacle_twin(config_.mode)) {
      AssistanceResult res = handle_assistance(a, registry_, world_->map, ledger_, world_->field,
                                               config_.mode, streams);
      if (res.plan) {
        a.rescue = std::move(res.plan);
        a.mode = AgentMode::kRescueFollow;
        a.blocked_proposals = 0;
        ++metrics_.assistance_grants;
        continue;
      }
    }
    a.rescue.reset();
    a.mode = AgentMode::kRandomWalk;
    a.walk_reason = WalkReason::kStuck;
  }
}

void Simulation::record_round(long moves_before) {
  RoundRecord rec;
  rec.round = round_;
  rec.traffic = ledger_.rounds().back();
  rec.cumulative_uplink = ledger_.totals().uplink_attempts;
  rec.cumulative_downlink = ledger_.totals().downlink_attempts;
  long moves_after = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : agents_) {
    moves_after += a.moves;
    if (a.mode == AgentMode::kArrived) ++rec.arrived;
    best = std::min(best, a.pbest_dist);
  }
  rec.moves = moves_after - moves_before;
  rec.swarm_best_dist = best;
  const auto status = check_convergence(agents_, world_->map.target(),
                                        config_.convergence_radius_m, config_.convergence_fraction);
  rec.convergence_fraction = status.fraction;
  metrics_.series.push_back(rec);

  const RoundTraffic& t = ledger_.totals();
  metrics_.converged = status.converged;
  metrics_.rounds_used = round_;
  metrics_.final_convergence_fraction = status.fraction;
  metrics_.total_moves = moves_after;
  metrics_.uplink_attempts = t.uplink_attempts;
  metrics_.uplink_successes = t.uplink_successes;
  metrics_.downlink_attempts = t.downlink_attempts;
  metrics_.downlink_successes = t.downlink_successes;
  metrics_.assistance_requests = t.assistance_requests;
}

RunMetrics Simulation::run() {
  while (step()) {
  }
  return metrics_;
}

RunMetrics run_scenario(std::shared_ptr<const World> world, const ScenarioConfig& config) {
  Simulation sim(std::move(world), config);
  return sim.run();
}

}  // namespace dtswarm
