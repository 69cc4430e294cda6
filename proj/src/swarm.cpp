#include "dtswarm/swarm.hpp"

#include <cmath>
#include <stdexcept>

namespace dtswarm {

void PsoParams::validate() const {
  if (!(v_max > 0.0)) throw std::invalid_argument("pso.v_max > 0");
  if (stuck_threshold < 1) throw std::invalid_argument("pso.stuck_threshold >= 1");
  if (!(stagnation_radius >= 0.0)) throw std::invalid_argument("pso.stagnation_radius >= 0");
  if (!(random_walk_step > 0.0) || random_walk_step > v_max) {
    throw std::invalid_argument("pso.random_walk_step in (0, v_max]");
  }
  if (!std::isfinite(inertia) || !std::isfinite(cognitive) || !std::isfinite(social)) {
    throw std::invalid_argument("pso coefficients must be finite");
  }
}

const char* to_string(AgentMode mode) {
  switch (mode) {
    case AgentMode::kPso: return "PSO";
    case AgentMode::kRandomWalk: return "RANDOM_WALK";
    case AgentMode::kRescueFollow: return "RESCUE_FOLLOW";
    case AgentMode::kArrived: return "ARRIVED";
  }
  return "?";
}

void observe_distance(AgentState& agent, double sensed) {
  agent.last_sensed_dist = sensed;
  if (sensed < agent.pbest_dist) {
    agent.pbest_dist = sensed;
    agent.pbest_pos = agent.pos;
  }
}

Vec2 pso_step(const AgentState& agent, Vec2 gbest, const PsoParams& params, RandomStream& rng) {
  const double r1x = rng.uniform();
  const double r1y = rng.uniform();
  const double r2x = rng.uniform();
  const double r2y = rng.uniform();
  const Vec2 to_pbest = agent.pbest_pos - agent.pos;
  const Vec2 to_gbest = gbest - agent.pos;
  Vec2 v{params.inertia * agent.vel.x + params.cognitive * r1x * to_pbest.x +
             params.social * r2x * to_gbest.x,
         params.inertia * agent.vel.y + params.cognitive * r1y * to_pbest.y +
             params.social * r2y * to_gbest.y};
  const double speed = v.norm();
  if (speed > params.v_max) v = v * (params.v_max / speed);
  return agent.pos + v;
}

WalkProposal random_walk_step(const AgentState& agent, const WorldMap& map,
                              const AvoidanceParams& avoidance, double step_length,
                              RandomStream& rng) {
  WalkProposal out;
  out.drawn_heading = rng.uniform(0.0, kTwoPi);
  const RangeScan scan = range_scan(map, agent.pos, avoidance.ray_count, avoidance.max_range_m);
  const PolarHistogram hist = build_histogram(scan, avoidance.sector_count, avoidance.threshold);
  out.selected_heading = select_heading(hist, out.drawn_heading, avoidance.safety_margin_sectors);
  if (out.selected_heading) {
    out.proposal = agent.pos + unit_from_heading(*out.selected_heading) * step_length;
  }
  return out;
}

MoveOutcome apply_move(AgentState& agent, Vec2 proposal, const WorldMap& map) {
  const Vec2 target = map.clamp(proposal);
  if (distance(target, agent.pos) == 0.0) return MoveOutcome::kStayed;
  if (is_free(map, target) && segment_clear(map, agent.pos, target)) {
    agent.vel = target - agent.pos;
    agent.pos = target;
    ++agent.moves;
    agent.blocked_proposals = 0;
    return MoveOutcome::kMoved;
  }
  agent.vel = {};
  ++agent.blocked_proposals;
  return MoveOutcome::kBlocked;
}

bool detect_stuck(const AgentState& agent, const PsoParams& params) {
  return agent.blocked_proposals >= params.stuck_threshold;
}

void escape_gbest_stagnation(AgentState& agent, Vec2 gbest, double stagnation_radius,
                             Vec2 target, double convergence_radius) {
  if (agent.mode == AgentMode::kArrived) return;
  if (distance(agent.pos, target) <= convergence_radius) {
    agent.mode = AgentMode::kArrived;
    agent.rescue.reset();
    agent.vel = {};
    return;
  }
  if (agent.mode == AgentMode::kPso && distance(agent.pos, gbest) <= stagnation_radius) {
    agent.mode = AgentMode::kRandomWalk;
    agent.walk_reason = WalkReason::kStagnation;
  }
}

}  // namespace dtswarm
