#include "dtswarm/coordinator.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace dtswarm {

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 5> kModeNames{{
    {Mode::kP2P, "P2P"},
    {Mode::kDT1, "DT1"},
    {Mode::kDT2, "DT2"},
    {Mode::kRW1, "RW1"},
    {Mode::kRW2, "RW2"},
}};

}  // namespace

std::string_view to_string(Mode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "'; valid modes are P2P, DT1, DT2, RW1, RW2");
}

int attempts_per_leg(Mode mode, int n_agents) {
  if (!retries_on_failure(mode)) return 1;
  return std::max(1, 1 + (n_agents - 2));
}

void TwinRegistry::begin_round() {
  for (auto& t : twins_) t.fresh = false;
}

void TwinRegistry::record(int agent, Vec2 pos, double d, int round) {
  TwinEntry& t = twins_.at(static_cast<std::size_t>(agent));
  t.known = true;
  t.last_known_pos = pos;
  t.last_d = d;
  t.fresh = true;
  keep_best(best_, BestRecord{pos, d, agent, round});
}

void TwinRegistry::mark_arrived(int agent) { twins_.at(static_cast<std::size_t>(agent)).arrived = true; }

BestRecord compute_gbest(const TwinRegistry& reg) {
  if (!reg.best()) throw CoordinatorError("empty registry: no agent has uploaded yet");
  return *reg.best();
}

RoundTraffic& CommLedger::current() {
  if (rounds_.empty()) rounds_.emplace_back();
  return rounds_.back();
}

void CommLedger::log_uplink(bool success) {
  RoundTraffic& r = current();
  ++totals_.uplink_attempts;
  ++r.uplink_attempts;
  if (success) {
    ++totals_.uplink_successes;
    ++r.uplink_successes;
  }
}

void CommLedger::log_downlink(bool success) {
  RoundTraffic& r = current();
  ++totals_.downlink_attempts;
  ++r.downlink_attempts;
  if (success) {
    ++totals_.downlink_successes;
    ++r.downlink_successes;
  }
}

std::vector<ExchangeResult> dt_exchange(std::span<const AgentState> agents, TwinRegistry& reg,
                                        const RadioField& field, CommLedger& ledger, Mode mode,
                                        const RoundStreams& streams) {
  const int attempts = attempts_per_leg(mode, static_cast<int>(agents.size()));
  std::vector<ExchangeResult> results(agents.size());
  std::vector<bool> uplinked(agents.size(), false);

  reg.begin_round();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentState& a = agents[i];
    if (a.mode == AgentMode::kArrived) continue;
    RandomStream rng = streams(a.id, StreamPurpose::kUplink);
    for (int k = 0; k < attempts && !uplinked[i]; ++k) {
      uplinked[i] = try_transmit(field, a.pos, rng);
      ledger.log_uplink(uplinked[i]);
    }
    if (uplinked[i]) {
      reg.record(a.id, a.pos, a.last_sensed_dist, streams.round);
    } else {
      results[i].status = LinkStatus::kFailed;
    }
  }

  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!uplinked[i]) continue;
    const AgentState& a = agents[i];
    RandomStream rng = streams(a.id, StreamPurpose::kDownlink);
    const bool delivered = try_transmit(field, a.pos, rng);
    ledger.log_downlink(delivered);
    if (delivered) {
      results[i].status = LinkStatus::kSuccess;
      results[i].gbest = compute_gbest(reg);
    } else {
      results[i].status = LinkStatus::kFailed;
    }
  }
  return results;
}

bool peer_link_succeeds(double per_sender, double per_receiver, RandomStream& sender_rng,
                        RandomStream& receiver_rng) {
  const bool sent = sender_rng.uniform() >= per_sender;
  const bool heard = receiver_rng.uniform() >= per_receiver;
  return sent && heard;
}

std::vector<ExchangeResult> p2p_exchange(std::span<const AgentState> agents,
                                         const RadioField& field, CommLedger& ledger,
                                         const RoundStreams& streams) {
  const std::size_t n = agents.size();
  std::vector<RandomStream> send_rng;
  std::vector<RandomStream> recv_rng;
  std::vector<double> per(n);
  send_rng.reserve(n);
  recv_rng.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    send_rng.push_back(streams(agents[i].id, StreamPurpose::kPeerSend));
    recv_rng.push_back(streams(agents[i].id, StreamPurpose::kPeerReceive));
    per[i] = field.per_at(agents[i].pos);
  }

  std::vector<ExchangeResult> results(n);
  std::vector<int> received(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    results[j].gbest = agents[j].gbest_view;
    const AgentState& self = agents[j];
    keep_best(results[j].gbest, BestRecord{self.pos, self.last_sensed_dist, self.id, streams.round});
  }
  // Sender-major order; each endpoint consumes its own stream in id order so
  // the outcome of a pair never depends on evaluation order.
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& sender = agents[i];
    const BestRecord report{sender.pos, sender.last_sensed_dist, sender.id, streams.round};
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool ok = peer_link_succeeds(per[i], per[j], send_rng[i], recv_rng[j]);
      ledger.log_uplink(ok);
      if (ok) {
        ++received[j];
        keep_best(results[j].gbest, report);
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    results[j].status = (n >= 2 && received[j] == 0) ? LinkStatus::kFailed : LinkStatus::kSuccess;
  }
  return results;
}

AssistanceResult handle_assistance(const AgentState& agent, const TwinRegistry& reg,
                                   const WorldMap& map, CommLedger& ledger,
                                   const RadioField& field, Mode mode,
                                   const RoundStreams& streams) {
  AssistanceResult out;
  if (!has_obstacle_twin(mode)) {
    out.denial = AssistanceDenial::kNoObstacleTwin;
    return out;
  }
  RandomStream rng = streams(agent.id, StreamPurpose::kAssist);
  ledger.log_assistance_request();
  const bool request_ok = try_transmit(field, agent.pos, rng);
  ledger.log_uplink(request_ok);
  if (!request_ok) {
    out.denial = AssistanceDenial::kUplinkFailed;
    return out;
  }
  if (!reg.best()) {
    out.denial = AssistanceDenial::kNoGbest;
    return out;
  }
  const Vec2 goal = reg.best()->pos;
  auto path = plan(map, agent.pos, goal);
  if (!path) {
    out.denial = AssistanceDenial::kUnreachable;
    return out;
  }
  const bool reply_ok = try_transmit(field, agent.pos, rng);
  ledger.log_downlink(reply_ok);
  if (!reply_ok) {
    out.denial = AssistanceDenial::kDownlinkFailed;
    return out;
  }
  out.plan = RescuePlan{std::move(*path), goal, 0};
  return out;
}

}  // namespace dtswarm
