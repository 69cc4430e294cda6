#pragma once

#include <cstddef>
#include <limits>
#include <optional>

#include "dtswarm/avoidance.hpp"
#include "dtswarm/environment.hpp"
#include "dtswarm/planner.hpp"
#include "dtswarm/rng.hpp"

namespace dtswarm {

struct PsoParams {
  double inertia = 0.7298;
  double cognitive = 1.49618;
  double social = 1.49618;
  double v_max = 5.0;
  int stuck_threshold = 3;
  /// Distance to gbest under which a non-arrived agent leaves by random walk.
  double stagnation_radius = 2.0;
  double random_walk_step = 5.0;

  void validate() const;
};

enum class AgentMode { kPso, kRandomWalk, kRescueFollow, kArrived };

/// Why an agent is in random-walk mode. Walks caused by a lost link last
/// until the next successful exchange; the others are a single step.
enum class WalkReason { kCommFailure, kStuck, kStagnation };

const char* to_string(AgentMode mode);

/// A (position, sensed distance) report. Ordered by distance, then agent id,
/// then round, so every view of "the best report" agrees on ties.
struct BestRecord {
  Vec2 pos;
  double dist = std::numeric_limits<double>::infinity();
  int agent = 0;
  int round = 0;

  bool better_than(const BestRecord& o) const {
    if (dist != o.dist) return dist < o.dist;
    if (agent != o.agent) return agent < o.agent;
    return round < o.round;
  }
  bool operator==(const BestRecord&) const = default;
};

/// Keeps the better of the current and the candidate record.
inline void keep_best(std::optional<BestRecord>& current, const BestRecord& candidate) {
  if (!current || candidate.better_than(*current)) current = candidate;
}

struct RescuePlan {
  GridPath path;
  /// gbest position the path was planned toward.
  Vec2 goal;
  std::size_t progress = 0;
};

struct AgentState {
  int id = 0;
  Vec2 pos;
  Vec2 vel;
  Vec2 pbest_pos;
  double pbest_dist = std::numeric_limits<double>::infinity();
  double last_sensed_dist = std::numeric_limits<double>::infinity();
  AgentMode mode = AgentMode::kPso;
  WalkReason walk_reason = WalkReason::kCommFailure;
  int blocked_proposals = 0;
  std::optional<RescuePlan> rescue;
  /// Last gbest this agent received (DT family) or assembled (P2P).
  std::optional<BestRecord> gbest_view;
  long moves = 0;
};

/// Records a fresh sensor reading and updates the personal best.
void observe_distance(AgentState& agent, double sensed);

/// Constriction-style PSO update with per-axis random weights, speed capped
/// at v_max. Returns the proposed position; the agent is not modified.
Vec2 pso_step(const AgentState& agent, Vec2 gbest, const PsoParams& params, RandomStream& rng);

struct WalkProposal {
  double drawn_heading = 0.0;
  std::optional<double> selected_heading;
  /// Empty when avoidance found no open heading.
  std::optional<Vec2> proposal;
};

/// Uniform random heading filtered through the polar histogram of a fresh
/// range scan.
WalkProposal random_walk_step(const AgentState& agent, const WorldMap& map,
                              const AvoidanceParams& avoidance, double step_length,
                              RandomStream& rng);

enum class MoveOutcome { kMoved, kBlocked, kStayed };

/// Executes a proposal when the clamped target is free and reachable in a
/// straight line; otherwise counts a blocked proposal. Zero-length proposals
/// are neither moves nor blocks. Velocity becomes the executed displacement.
MoveOutcome apply_move(AgentState& agent, Vec2 proposal, const WorldMap& map);

bool detect_stuck(const AgentState& agent, const PsoParams& params);

/// Arrival dominates: an agent within convergence_radius of the target is
/// marked arrived. Otherwise a PSO agent sitting within stagnation_radius of
/// gbest switches to a one-step random walk.
void escape_gbest_stagnation(AgentState& agent, Vec2 gbest, double stagnation_radius,
                             Vec2 target, double convergence_radius);

}  // namespace dtswarm
