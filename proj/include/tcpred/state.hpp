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
#ifndef TCPRED_STATE_HPP_
#define TCPRED_STATE_HPP_

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tcpred/config.hpp"

namespace tcpred {

/// Round-trip time for a queue of `queue` packets: fixed propagation delay
/// plus the queueing delay queue/capacity.
inline double rtt(double queue, double delay, double capacity) {
  if (queue < 0.0) throw std::domain_error("rtt: negative queue length");
  return delay + queue / capacity;
}

/// RED drop probability as a function of the averaged queue: zero below
/// min_thresh, a linear ramp up to max_prob on [min_thresh, max_thresh]
/// (the endpoint itself takes the ramp value max_prob), and 1 above.
inline double red_drop_probability(double avg_queue, const RedParams& red) {
  if (avg_queue < red.min_thresh) return 0.0;
  if (avg_queue > red.max_thresh) return 1.0;
  return (avg_queue - red.min_thresh) / (red.max_thresh - red.min_thresh) *
         red.max_prob;
}

/// Loss-recovery automaton phase of one sender.
enum class Phase : int {
  CongestionAvoidance = 0,  // normal additive increase
  DropNotification = 1,     // a drop occurred; the sender learns one RTT later
  RecoveryNoSend = 2,       // window cut; nothing transmitted, queue drains
  RecoveryTransmit = 3,     // transmitting again, window held fixed
};

/// Per-sender automaton bookkeeping. `timer` counts down in seconds for the
/// continuous model and in packet-time steps for the discrete model; `span`
/// stores the recovery length frozen at the moment of the window cut.
struct SenderPhase {
  Phase phase = Phase::CongestionAvoidance;
  double timer = 0.0;
  double span = 0.0;
};

/// Full model state shared by both models: per-sender congestion windows,
/// the instantaneous and averaged queue, and the per-sender automata.
/// Windows and queues are in packets and may be fractional.
struct ModelState {
  double t = 0.0;
  long step = 0;  // step index; meaningful for the discrete model
  std::vector<double> windows;
  double queue = 0.0;
  double avg_queue = 0.0;
  std::vector<SenderPhase> senders;

  int n_senders() const { return static_cast<int>(windows.size()); }

  /// Trace summary for multi-sender states: the phase of the lowest-index
  /// sender not in congestion avoidance, or CongestionAvoidance if all are.
  Phase aggregate_phase() const {
    for (const auto& s : senders) {
      if (s.phase != Phase::CongestionAvoidance) return s.phase;
    }
    return Phase::CongestionAvoidance;
  }

  void validate() const {
    if (windows.size() != senders.size()) {
      throw std::invalid_argument("ModelState: windows/senders size mismatch");
    }
    if (!(queue >= 0.0) || !(avg_queue >= 0.0)) {
      throw std::invalid_argument("ModelState: queues must be nonnegative");
    }
    for (double w : windows) {
      if (!(w >= 1.0)) {
        throw std::invalid_argument("ModelState: windows must be >= 1 packet");
      }
    }
    for (const auto& s : senders) {
      if (s.phase != Phase::CongestionAvoidance && !(s.timer > 0.0)) {
        throw std::invalid_argument("ModelState: phase timer must be positive");
      }
    }
  }
};

/// Saturation-onset start state used by both models: empty queue and each
/// window at its sender's bandwidth-delay product c*a_i.
inline ModelState initial_state(const NetworkConfig& net) {
  ModelState s;
  const double c = net.capacity();
  s.windows.reserve(net.senders.size());
  for (const auto& snd : net.senders) s.windows.push_back(c * snd.delay);
  s.senders.assign(net.senders.size(), SenderPhase{});
  return s;
}

}  // namespace tcpred

#endif  // TCPRED_STATE_HPP_
