/* Copyright 2026 The tcpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef TCPRED_ORACLE_HPP_
#define TCPRED_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "tcpred/config.hpp"
#include "tcpred/drop.hpp"
#include "tcpred/state.hpp"
#include "tcpred/trace.hpp"

namespace tcpred {
namespace oracle {

// Packet-level simulator of the reference topology: N bulk-transfer senders,
// one RED router in front of the bottleneck link, one receiver, ACK-per-packet
// on an uncongested return path. Senders run additive increase with a
// fast-recovery hold: the window halves once per round trip when an ACK
// reveals a sequence gap, and is then held for one measured round trip.
// There is no slow start, no retransmission and no timeout; the fixed delay
// is split evenly across the forward and return paths, and per-packet
// service time 1/c at the router is in addition to it.

struct OracleConfig {
  double buffer_limit = 0.0;     // packets; 0 selects 2 * max_thresh
  double sample_interval = 0.0;  // seconds; 0 selects the packet interval
  DropMode drop_mode = DropMode::FullRed;  // FullRed or None (tail drop only)
};

struct OracleStats {
  long emitted = 0;
  long acked = 0;
  long red_drops = 0;
  long tail_drops = 0;
  long written_off = 0;  // stale in-flight packets cleared at reactivation
  long busy_spacing_violations = 0;
};

namespace detail {

enum class EventKind : int {
  ArriveQueue = 0,
  DepartQueue = 1,
  AckArrive = 2,
  SenderWake = 3,
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::ArriveQueue;
  int sender = 0;
  long seq = 0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.kind, a.sender, a.seq) >
           std::tie(b.time, b.kind, b.sender, b.seq);
  }
};

struct Outstanding {
  long seq = 0;
  double sent = 0.0;
};

struct Tcb {
  double window = 1.0;
  int in_flight = 0;
  long next_seq = 0;
  double recovery_until = -1e300;
  std::deque<Outstanding> outstanding;
};

struct QueuedPacket {
  int sender = 0;
  long seq = 0;
};

}  // namespace detail

class Simulator {
 public:
  Simulator(const NetworkConfig& net, const RedParams& red, std::uint64_t seed,
            const OracleConfig& cfg)
      : net_(net),
        red_(red),
        cfg_(cfg),
        capacity_(net.capacity()),
        delta_(net.packet_interval()),
        process_(cfg.drop_mode, seed) {
    net_.validate();
    red_.validate();
    if (cfg_.drop_mode != DropMode::FullRed && cfg_.drop_mode != DropMode::None) {
      throw std::invalid_argument("oracle: drop mode must be full-red or none");
    }
    if (cfg_.buffer_limit <= 0.0) cfg_.buffer_limit = 2.0 * red.max_thresh;
    if (cfg_.sample_interval <= 0.0) cfg_.sample_interval = delta_;
    tcbs_.resize(net_.senders.size());
    for (std::size_t i = 0; i < tcbs_.size(); ++i) {
      tcbs_[i].window = std::max(1.0, capacity_ * net_.delay(static_cast<int>(i)));
    }
  }

  Trace run(double t_end, OracleStats* stats_out = nullptr) {
    Trace trace;
    trace.source = TraceSource::Oracle;
    for (std::size_t i = 0; i < tcbs_.size(); ++i) {
      for (const auto& iv : net_.senders[i].active) {
        if (iv.on <= t_end) {
          push({iv.on, detail::EventKind::SenderWake, static_cast<int>(i), 0});
        }
      }
    }
    double sample_t = 0.0;
    double last_time = 0.0;
    while (!events_.empty() && events_.top().time <= t_end) {
      const detail::Event ev = events_.top();
      events_.pop();
      while (sample_t < ev.time - 1e-12 && sample_t <= t_end) {
        trace.samples.push_back(snapshot(sample_t));
        sample_t += cfg_.sample_interval;
      }
      last_time = ev.time;
      dispatch(ev, trace);
    }
    // Events ran dry (all senders off) or only post-horizon events remain:
    // the state is frozen from the last processed event onward.
    const double horizon = events_.empty() ? last_time : t_end;
    while (sample_t <= horizon + 1e-12) {
      trace.samples.push_back(snapshot(sample_t));
      sample_t += cfg_.sample_interval;
    }
    if (stats_out) *stats_out = stats_;
    return trace;
  }

  const OracleStats& stats() const { return stats_; }

 private:
  void push(const detail::Event& e) { events_.push(e); }

  ModelState snapshot(double t) const {
    ModelState s;
    s.t = t;
    s.queue = static_cast<double>(queue_.size());
    s.avg_queue = avg_queue_;
    s.windows.reserve(tcbs_.size());
    s.senders.reserve(tcbs_.size());
    for (const auto& tcb : tcbs_) {
      s.windows.push_back(tcb.window);
      SenderPhase sp;
      if (t < tcb.recovery_until) {
        sp.phase = Phase::RecoveryTransmit;
        sp.timer = tcb.recovery_until - t;
        sp.span = sp.timer;
      }
      s.senders.push_back(sp);
    }
    return s;
  }

  void dispatch(const detail::Event& ev, Trace& trace) {
    switch (ev.kind) {
      case detail::EventKind::SenderWake: on_wake(ev.sender, ev.time); break;
      case detail::EventKind::ArriveQueue:
        on_arrive(ev.sender, ev.seq, ev.time, trace);
        break;
      case detail::EventKind::DepartQueue: on_depart(ev.time); break;
      case detail::EventKind::AckArrive:
        on_ack(ev.sender, ev.seq, ev.time);
        break;
    }
  }

  void on_wake(int i, double t) {
    detail::Tcb& tcb = tcbs_[i];
    // Anything still unacknowledged after an off interval is long dead;
    // write it off without treating it as a congestion signal.
    const double horizon =
        4.0 * (net_.delay(i) + cfg_.buffer_limit / capacity_ + delta_);
    while (!tcb.outstanding.empty() &&
           t - tcb.outstanding.front().sent > horizon) {
      tcb.outstanding.pop_front();
      tcb.in_flight = std::max(0, tcb.in_flight - 1);
      ++stats_.written_off;
    }
    top_up(i, t);
  }

  void top_up(int i, double t) {
    if (!net_.is_active(i, t)) return;
    detail::Tcb& tcb = tcbs_[i];
    while (tcb.in_flight < static_cast<int>(std::floor(tcb.window + 1e-9))) {
      const long seq = tcb.next_seq++;
      tcb.outstanding.push_back({seq, t});
      ++tcb.in_flight;
      ++stats_.emitted;
      push({t + net_.delay(i) * 0.5, detail::EventKind::ArriveQueue, i, seq});
    }
  }

  void on_arrive(int i, long seq, double t, Trace& trace) {
    const double occupancy = static_cast<double>(queue_.size());
    avg_queue_ = red_.weight * occupancy + (1.0 - red_.weight) * avg_queue_;
    if (process_.on_arrivals(1.0, occupancy, avg_queue_, red_) > 0) {
      ++stats_.red_drops;
      trace.drops.push_back({t, i});
      return;
    }
    if (occupancy >= cfg_.buffer_limit) {
      ++stats_.tail_drops;
      trace.drops.push_back({t, i});
      return;
    }
    queue_.push_back({i, seq});
    if (!server_busy_) {
      server_busy_ = true;
      push({t + delta_, detail::EventKind::DepartQueue, 0, depart_seq_++});
    }
  }

  void on_depart(double t) {
    if (queue_.empty()) return;  // cannot happen; guards a scheduling bug
    if (expected_depart_ >= 0.0 && std::abs(t - expected_depart_) > 1e-9) {
      ++stats_.busy_spacing_violations;
    }
    const detail::QueuedPacket p = queue_.front();
    queue_.pop_front();
    push({t + net_.delay(p.sender) * 0.5, detail::EventKind::AckArrive,
          p.sender, p.seq});
    if (!queue_.empty()) {
      expected_depart_ = t + delta_;
      push({t + delta_, detail::EventKind::DepartQueue, 0, depart_seq_++});
    } else {
      server_busy_ = false;
      expected_depart_ = -1.0;
    }
  }

  void on_ack(int i, long seq, double t) {
    detail::Tcb& tcb = tcbs_[i];
    int losses = 0;
    double acked_sent = -1.0;
    while (!tcb.outstanding.empty() && tcb.outstanding.front().seq < seq) {
      tcb.outstanding.pop_front();
      ++losses;
    }
    int released = losses;
    if (!tcb.outstanding.empty() && tcb.outstanding.front().seq == seq) {
      acked_sent = tcb.outstanding.front().sent;
      tcb.outstanding.pop_front();
      ++released;
    }
    tcb.in_flight = std::max(0, tcb.in_flight - released);
    ++stats_.acked;
    const bool in_recovery = t < tcb.recovery_until;
    if (losses > 0 && !in_recovery) {
      tcb.window = std::max(tcb.window * 0.5, 1.0);
      const double rtt_sample =
          acked_sent >= 0.0
              ? t - acked_sent
              : net_.delay(i) + static_cast<double>(queue_.size()) / capacity_;
      tcb.recovery_until = t + rtt_sample;
    } else if (losses == 0 && !in_recovery && net_.is_active(i, t)) {
      tcb.window += 1.0 / tcb.window;
    }
    top_up(i, t);
  }

  NetworkConfig net_;
  RedParams red_;
  OracleConfig cfg_;
  double capacity_;
  double delta_;
  DropProcess process_;
  std::vector<detail::Tcb> tcbs_;
  std::deque<detail::QueuedPacket> queue_;
  double avg_queue_ = 0.0;
  bool server_busy_ = false;
  double expected_depart_ = -1.0;
  long depart_seq_ = 0;
  OracleStats stats_;
  std::priority_queue<detail::Event, std::vector<detail::Event>,
                      detail::EventAfter>
      events_;
};

inline Trace run(const NetworkConfig& net, const RedParams& red, double t_end,
                 std::uint64_t seed, const OracleConfig& cfg = {},
                 OracleStats* stats = nullptr) {
  Simulator sim(net, red, seed, cfg);
  return sim.run(t_end, stats);
}

}  // namespace oracle
}  // namespace tcpred

#endif  // TCPRED_ORACLE_HPP_
