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
#ifndef TCPRED_CONTINUOUS_HPP_
#define TCPRED_CONTINUOUS_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcpred/config.hpp"
#include "tcpred/drop.hpp"
#include "tcpred/state.hpp"
#include "tcpred/trace.hpp"

namespace tcpred {

struct SimulationDiverged : std::runtime_error {
  explicit SimulationDiverged(double t)
      : std::runtime_error("simulation state became non-finite at t=" +
                           std::to_string(t)) {}
};

/// Events produced by a single model step.
struct StepEvents {
  std::vector<DropEvent> drops;
  bool queue_clamped = false;  // a recovery drain ran into an empty queue
};

namespace continuous {

/// Instantaneous derivatives of the window/queue/average-queue system.
struct FlowRates {
  std::vector<double> window_rate;  // packets/second, one per sender
  double queue_rate = 0.0;
  double avg_queue_rate = 0.0;
  double inflow = 0.0;  // total packet arrival rate at the router
};

struct IntegratorConfig {
  double step_size = 0.0;  // Euler step h, seconds; 0 < h <= 1/c
  bool saturated = true;   // drop the empty-queue branch and use the
                           // capacity-rate form of the averaging filter
  bool emulate_no_send = false;  // extension beyond the base model: drain the
                                 // queue with zero inflow for W/2 packet
                                 // times after each window cut
  int sample_stride = 1;

  static IntegratorConfig defaults(const NetworkConfig& net) {
    IntegratorConfig cfg;
    cfg.step_size = net.packet_interval() / 4.0;
    return cfg;
  }

  void validate(const NetworkConfig& net) const {
    if (!(step_size > 0.0) ||
        step_size > net.packet_interval() * (1.0 + 1e-12)) {
      throw std::invalid_argument(
          "IntegratorConfig: step_size must be in (0, 1/c]");
    }
    if (sample_stride < 1) {
      throw std::invalid_argument("IntegratorConfig: sample_stride >= 1");
    }
  }
};

/// Right-hand sides of the flow equations for the current state. Window
/// growth runs at 1/R_i for senders in congestion avoidance or awaiting a
/// drop notification and is zero for held (recovering) or inactive senders.
/// The queue integrates total inflow minus capacity; in the non-saturated
/// form the outflow is limited at an empty queue and the averaging filter
/// relaxes at the actual arrival rate instead of the capacity.
inline FlowRates rates(const ModelState& s, const NetworkConfig& net,
                       const RedParams& red, bool saturated) {
  FlowRates r;
  const double c = net.capacity();
  const int n = s.n_senders();
  r.window_rate.resize(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const bool active = net.is_active(i, s.t);
    const Phase ph = s.senders[i].phase;
    const double rtt_i = rtt(s.queue, net.delay(i), c);
    const bool transmitting = active && ph != Phase::RecoveryNoSend;
    if (transmitting) r.inflow += s.windows[i] / rtt_i;
    const bool growing = active && (ph == Phase::CongestionAvoidance ||
                                    ph == Phase::DropNotification);
    if (growing) r.window_rate[i] = 1.0 / rtt_i;
  }
  if (saturated) {
    r.queue_rate = r.inflow - c;
    r.avg_queue_rate = red.weight * c * (s.queue - s.avg_queue);
  } else {
    r.queue_rate = r.inflow - c;
    if (s.queue == 0.0 && r.queue_rate < 0.0) r.queue_rate = 0.0;
    r.avg_queue_rate = red.weight * (s.queue - s.avg_queue) * r.inflow;
  }
  return r;
}

struct UnitStepResult {
  double window = 0.0;
  double queue = 0.0;
  double avg_queue = 0.0;
};

namespace detail {

/// One packet-time update of the single-sender reduced maps: the window
/// gains 1/(ac+q), the queue gains the inflow share W/(ac+q) and loses one
/// departing packet (none when it starts empty), and the average is the RED
/// filter applied to the post-update queue.
inline UnitStepResult packet_map(double window, double queue, double avg_queue,
                                 double bdp, double weight, bool growing,
                                 bool transmitting) {
  const double denom = bdp + queue;
  const double inflow = transmitting ? window / denom : 0.0;
  double q_next;
  if (queue > 0.0) {
    q_next = queue + inflow - 1.0;
    if (q_next < 0.0) q_next = 0.0;
  } else {
    q_next = queue + inflow;
  }
  const double w_next = growing ? window + 1.0 / denom : window;
  const double x_next = weight * q_next + (1.0 - weight) * avg_queue;
  return {w_next, q_next, x_next};
}

}  // namespace detail

/// Single-sender per-packet map obtained from the Euler step at h = 1/c:
/// the reduced closed form of the non-saturated equations.
inline UnitStepResult unit_step_map(double window, double queue,
                                    double avg_queue, const NetworkConfig& net,
                                    const RedParams& red) {
  if (net.n_senders() != 1) {
    throw std::invalid_argument("unit_step_map: single-sender configuration");
  }
  const double bdp = net.delay(0) * net.capacity();
  return detail::packet_map(window, queue, avg_queue, bdp, red.weight, true,
                            true);
}

namespace detail {

inline constexpr double kTimerEps = 1e-12;

/// Phase transitions shared by both integration paths. Timers are set from
/// the round-trip time at the transition instant and frozen.
inline void run_automaton(ModelState& s, const NetworkConfig& net, double h,
                          bool emulate_no_send) {
  const double c = net.capacity();
  const double delta = net.packet_interval();
  for (int i = 0; i < s.n_senders(); ++i) {
    SenderPhase& sp = s.senders[i];
    if (sp.phase == Phase::CongestionAvoidance) continue;
    sp.timer -= h;
    switch (sp.phase) {
      case Phase::DropNotification:
        if (sp.timer <= kTimerEps) {
          s.windows[i] = std::max(s.windows[i] * 0.5, 1.0);
          const double r = rtt(s.queue, net.delay(i), c);
          sp.timer = r;
          sp.span = r;
          sp.phase = emulate_no_send ? Phase::RecoveryNoSend
                                     : Phase::RecoveryTransmit;
        }
        break;
      case Phase::RecoveryNoSend:
        if (sp.timer <= kTimerEps) {
          sp = SenderPhase{};
        } else if (sp.timer <= sp.span - s.windows[i] * delta) {
          // the no-send span is W/2 packet times, with W the pre-cut window
          sp.phase = Phase::RecoveryTransmit;
        }
        break;
      case Phase::RecoveryTransmit:
        if (sp.timer <= kTimerEps) sp = SenderPhase{};
        break;
      case Phase::CongestionAvoidance:
        break;
    }
  }
}

/// Applies a drop-process firing to the sender automata and records the
/// resulting drop events. Deterministic-class processes notify every active
/// sender in congestion avoidance at once; the stochastic process picks one
/// sender per fired drop in proportion to its flow share.
inline void apply_drops(ModelState& s, const NetworkConfig& net, int fires,
                        DropProcess& process, StepEvents* ev) {
  if (fires <= 0) return;
  const double c = net.capacity();
  if (process.mode() == DropMode::Deterministic ||
      process.mode() == DropMode::ExpectedInterdrop) {
    for (int i = 0; i < s.n_senders(); ++i) {
      SenderPhase& sp = s.senders[i];
      if (sp.phase != Phase::CongestionAvoidance) continue;
      if (!net.is_active(i, s.t)) continue;
      const double r = rtt(s.queue, net.delay(i), c);
      sp.phase = Phase::DropNotification;
      sp.timer = r;
      sp.span = r;
      if (ev) ev->drops.push_back({s.t, i});
    }
    return;
  }
  // FullRed: one sender per fired drop.
  std::vector<double> rtts(s.n_senders());
  std::vector<bool> transmitting(s.n_senders());
  bool any = false;
  for (int i = 0; i < s.n_senders(); ++i) {
    rtts[i] = rtt(s.queue, net.delay(i), c);
    transmitting[i] = net.is_active(i, s.t) &&
                      s.senders[i].phase != Phase::RecoveryNoSend;
    any = any || transmitting[i];
  }
  if (!any) return;
  for (int f = 0; f < fires; ++f) {
    const int victim =
        select_dropped_sender(s.windows, rtts, transmitting, process.rng());
    if (ev) ev->drops.push_back({s.t, victim});
    SenderPhase& sp = s.senders[victim];
    if (sp.phase == Phase::CongestionAvoidance) {
      sp.phase = Phase::DropNotification;
      sp.timer = rtts[victim];
      sp.span = rtts[victim];
    }
  }
}

}  // namespace detail

/// Advances the state by one Euler step of `rates`, then runs the phase
/// automaton and the drop process. When the step equals the packet interval
/// and the non-saturated single-sender equations are selected, the update is
/// applied in its per-packet closed form, so trajectories agree exactly with
/// iterating unit_step_map.
inline ModelState step(ModelState s, const NetworkConfig& net,
                       const RedParams& red, const IntegratorConfig& icfg,
                       DropProcess& process, StepEvents* ev = nullptr) {
  const double h = icfg.step_size;
  const bool reduced = !icfg.saturated && s.n_senders() == 1 &&
                       h == net.packet_interval();
  double arrivals = 0.0;
  if (reduced) {
    const bool active = net.is_active(0, s.t);
    const Phase ph = s.senders[0].phase;
    const bool growing = active && (ph == Phase::CongestionAvoidance ||
                                    ph == Phase::DropNotification);
    const bool transmitting = active && ph != Phase::RecoveryNoSend;
    const double bdp = net.delay(0) * net.capacity();
    arrivals =
        transmitting ? s.windows[0] / (bdp + s.queue) : 0.0;
    const auto next = detail::packet_map(s.windows[0], s.queue, s.avg_queue,
                                         bdp, red.weight, growing,
                                         transmitting);
    s.windows[0] = next.window;
    s.queue = next.queue;
    s.avg_queue = next.avg_queue;
  } else {
    const FlowRates r = rates(s, net, red, icfg.saturated);
    arrivals = h * r.inflow;
    for (int i = 0; i < s.n_senders(); ++i) {
      s.windows[i] += h * r.window_rate[i];
    }
    s.queue += h * r.queue_rate;
    if (s.queue < 0.0) s.queue = 0.0;
    s.avg_queue += h * r.avg_queue_rate;
  }
  s.t += h;
  detail::run_automaton(s, net, h, icfg.emulate_no_send);
  const int fires = process.on_arrivals(arrivals, s.queue, s.avg_queue, red);
  detail::apply_drops(s, net, fires, process, ev);
  return s;
}

/// Runs the model to t_end, sampling every sample_stride steps (the initial
/// state and the final step are always recorded).
inline Trace simulate(const NetworkConfig& net, const RedParams& red,
                      const IntegratorConfig& icfg, DropProcess& process,
                      double t_end, ModelState init) {
  net.validate();
  red.validate();
  icfg.validate(net);
  if (t_end < init.t) {
    throw std::invalid_argument("simulate: t_end before initial time");
  }
  Trace trace;
  trace.source = TraceSource::Continuous;
  trace.samples.push_back(init);
  const double h = icfg.step_size;
  const long n_steps =
      static_cast<long>(std::ceil((t_end - init.t) / h - 1e-9));
  ModelState s = std::move(init);
  StepEvents ev;
  for (long k = 1; k <= n_steps; ++k) {
    ev.drops.clear();
    s = step(std::move(s), net, red, icfg, process, &ev);
    for (const auto& d : ev.drops) trace.drops.push_back(d);
    if (!(std::isfinite(s.queue) && std::isfinite(s.avg_queue))) {
      throw SimulationDiverged(s.t);
    }
    for (double w : s.windows) {
      if (!std::isfinite(w)) throw SimulationDiverged(s.t);
    }
    if (k % icfg.sample_stride == 0 || k == n_steps) {
      trace.samples.push_back(s);
    }
  }
  return trace;
}

}  // namespace continuous
}  // namespace tcpred

#endif  // TCPRED_CONTINUOUS_HPP_
