#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dtswarm/environment.hpp"
#include "dtswarm/planner.hpp"
#include "dtswarm/radio.hpp"
#include "dtswarm/rng.hpp"
#include "dtswarm/swarm.hpp"

namespace dtswarm {

/// Communication and coordination mode.
///   P2P  - pairwise exchange, no edge server.
///   DT1  - twins on the edge server, one attempt per leg, path-planning rescue.
///   DT2  - as DT1, with up to n-2 uplink retries and holding still on failure.
///   RW1/RW2 - as DT1/DT2 but the server has no obstacle twin (no rescue).
enum class Mode { kP2P, kDT1, kDT2, kRW1, kRW2 };

std::string_view to_string(Mode mode);
/// Throws std::invalid_argument listing the valid names.
Mode parse_mode(std::string_view name);

inline bool uses_server(Mode m) { return m != Mode::kP2P; }
inline bool has_obstacle_twin(Mode m) { return m == Mode::kDT1 || m == Mode::kDT2; }
inline bool retries_on_failure(Mode m) { return m == Mode::kDT2 || m == Mode::kRW2; }

/// Uplink attempts per agent and round: 1, or 1 + (n - 2) in retry modes
/// (never below 1). The downlink is always a single attempt.
int attempts_per_leg(Mode mode, int n_agents);

class CoordinatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TwinEntry {
  bool known = false;
  Vec2 last_known_pos;
  double last_d = 0.0;
  bool fresh = false;
  bool arrived = false;
};

/// Edge-side twins. Entries go stale but are never dropped, and the best
/// report ever received is kept for the whole run.
class TwinRegistry {
 public:
  explicit TwinRegistry(int n_agents = 0) : twins_(static_cast<std::size_t>(n_agents)) {}

  void begin_round();
  void record(int agent, Vec2 pos, double d, int round);
  void mark_arrived(int agent);

  const TwinEntry& twin(int agent) const { return twins_.at(static_cast<std::size_t>(agent)); }
  std::size_t size() const { return twins_.size(); }
  const std::optional<BestRecord>& best() const { return best_; }

 private:
  std::vector<TwinEntry> twins_;
  std::optional<BestRecord> best_;
};

/// Position of the smallest distance ever reported. Throws CoordinatorError
/// on an empty registry.
BestRecord compute_gbest(const TwinRegistry& reg);

struct RoundTraffic {
  long uplink_attempts = 0;
  long uplink_successes = 0;
  long downlink_attempts = 0;
  long downlink_successes = 0;
  long assistance_requests = 0;

  bool operator==(const RoundTraffic&) const = default;
};

/// Transmission accounting. Assistance messages are charged to the same
/// uplink/downlink counters and also tallied separately.
class CommLedger {
 public:
  void begin_round() { rounds_.emplace_back(); }
  void log_uplink(bool success);
  void log_downlink(bool success);
  void log_assistance_request() {
    ++totals_.assistance_requests;
    ++current().assistance_requests;
  }

  const RoundTraffic& totals() const { return totals_; }
  const std::vector<RoundTraffic>& rounds() const { return rounds_; }

 private:
  RoundTraffic& current();

  RoundTraffic totals_;
  std::vector<RoundTraffic> rounds_;
};

enum class LinkStatus { kSkipped, kSuccess, kFailed };

struct ExchangeResult {
  LinkStatus status = LinkStatus::kSkipped;
  /// gbest delivered this round (success only).
  std::optional<BestRecord> gbest;
};

/// Upload/compute/download cycle through the edge server. All uplinks are
/// resolved first, gbest is computed from the updated registry, then only
/// agents whose uplink succeeded are served on the downlink.
std::vector<ExchangeResult> dt_exchange(std::span<const AgentState> agents, TwinRegistry& reg,
                                        const RadioField& field, CommLedger& ledger, Mode mode,
                                        const RoundStreams& streams);

/// Every ordered pair (i, j), i != j, carries i's current report. A message
/// arrives when both endpoint draws succeed. Each attempt is one logged
/// transmission (uplink counter). Arrived agents keep transmitting. Status is
/// kFailed for an agent that received nothing (n >= 2). The returned gbest is
/// the agent's updated view.
std::vector<ExchangeResult> p2p_exchange(std::span<const AgentState> agents,
                                         const RadioField& field, CommLedger& ledger,
                                         const RoundStreams& streams);

/// Link-success model for one directed peer message. Kept in one place so it
/// can be swapped for sensitivity runs.
bool peer_link_succeeds(double per_sender, double per_receiver, RandomStream& sender_rng,
                        RandomStream& receiver_rng);

enum class AssistanceDenial { kNoObstacleTwin, kUplinkFailed, kNoGbest, kUnreachable, kDownlinkFailed };

struct AssistanceResult {
  std::optional<RescuePlan> plan;
  std::optional<AssistanceDenial> denial;
};

/// One request uplink, planning on the obstacle twin toward the current
/// gbest, one reply downlink. Modes without an obstacle twin are denied
/// without any transmission.
AssistanceResult handle_assistance(const AgentState& agent, const TwinRegistry& reg,
                                   const WorldMap& map, CommLedger& ledger,
                                   const RadioField& field, Mode mode,
                                   const RoundStreams& streams);

}  // namespace dtswarm
