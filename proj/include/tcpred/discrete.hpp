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
#ifndef TCPRED_DISCRETE_HPP_
#define TCPRED_DISCRETE_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tcpred/config.hpp"
#include "tcpred/continuous.hpp"  // SimulationDiverged, StepEvents
#include "tcpred/drop.hpp"
#include "tcpred/state.hpp"
#include "tcpred/trace.hpp"

namespace tcpred {
namespace discrete {

/// Round-trip time in packet-time steps: nearest integer to a/delta + q.
inline long rtt_steps(double queue, const NetworkConfig& net, int sender = 0) {
  return std::llround(net.delay(sender) * net.capacity() + queue);
}

/// Self-clocked model step. Time advances by n*delta for n senders; the
/// per-sender maps are phase-gated:
///   congestion avoidance / awaiting notification: W += 1/W, q += 1/W
///   (queue and window share the increment exactly);
///   notification expiry: the growth map is replaced by the halving;
///   recovery without sending: W held, q loses one packet per step;
///   recovery with sending: W and q both held.
/// The averaging filter runs once per step on the pre-update queue. The drop
/// process sees n packet arrivals per step (the saturation assumption).
inline ModelState step(ModelState s, const NetworkConfig& net,
                       const RedParams& red, DropProcess& process,
                       StepEvents* ev = nullptr) {
  const int n = s.n_senders();
  const double q_pre = s.queue;
  double q_delta = 0.0;
  std::vector<int> cut_now;
  for (int i = 0; i < n; ++i) {
    SenderPhase& sp = s.senders[i];
    const bool active = net.is_active(i, s.t);
    switch (sp.phase) {
      case Phase::CongestionAvoidance: {
        if (active) {
          const double inc = 1.0 / s.windows[i];
          q_delta += inc;
          s.windows[i] += inc;
        }
        break;
      }
      case Phase::DropNotification: {
        if (sp.timer < n + 0.5) {
          // notification expires within this step: halve instead of growing
          q_delta += active ? 1.0 / s.windows[i] : 0.0;
          s.windows[i] = std::max(s.windows[i] * 0.5, 1.0);
          cut_now.push_back(i);
        } else {
          if (active) {
            const double inc = 1.0 / s.windows[i];
            q_delta += inc;
            s.windows[i] += inc;
          }
          sp.timer -= n;
        }
        break;
      }
      case Phase::RecoveryNoSend: {
        q_delta -= 1.0;  // the sender's service share drains unreplenished
        sp.timer -= n;
        const double transmit_at = sp.span - std::floor(0.5 * sp.span);
        if (sp.timer <= 1e-9) {
          sp = SenderPhase{};
        } else if (sp.timer <= transmit_at + 1e-9) {
          sp.phase = Phase::RecoveryTransmit;
        }
        break;
      }
      case Phase::RecoveryTransmit: {
        sp.timer -= n;
        if (sp.timer <= 1e-9) sp = SenderPhase{};
        break;
      }
    }
  }
  s.queue = q_pre + q_delta;
  if (s.queue < 0.0) {
    s.queue = 0.0;
    if (ev) ev->queue_clamped = true;
  }
  s.avg_queue = red.weight * q_pre + (1.0 - red.weight) * s.avg_queue;
  s.t += n * net.packet_interval();
  s.step += 1;
  // Recovery spans are measured from the queue as it stands after the cut.
  for (int i : cut_now) {
    SenderPhase& sp = s.senders[i];
    const double m =
        static_cast<double>(std::max<long>(1, rtt_steps(s.queue, net, i)));
    sp.phase = std::floor(0.5 * m) >= 1.0 ? Phase::RecoveryNoSend
                                          : Phase::RecoveryTransmit;
    sp.timer = m;
    sp.span = m;
  }
  const int fires = process.on_arrivals(static_cast<double>(n), s.queue,
                                        s.avg_queue, red);
  if (fires > 0) {
    if (process.mode() == DropMode::Deterministic ||
        process.mode() == DropMode::ExpectedInterdrop) {
      for (int i = 0; i < n; ++i) {
        SenderPhase& sp = s.senders[i];
        if (sp.phase != Phase::CongestionAvoidance) continue;
        if (!net.is_active(i, s.t)) continue;
        sp.phase = Phase::DropNotification;
        sp.timer =
            static_cast<double>(std::max<long>(1, rtt_steps(s.queue, net, i)));
        sp.span = sp.timer;
        if (ev) ev->drops.push_back({s.t, i});
      }
    } else {
      const double c = net.capacity();
      std::vector<double> rtts(n);
      std::vector<bool> transmitting(n);
      bool any = false;
      for (int i = 0; i < n; ++i) {
        rtts[i] = rtt(s.queue, net.delay(i), c);
        transmitting[i] = net.is_active(i, s.t) &&
                          s.senders[i].phase != Phase::RecoveryNoSend;
        any = any || transmitting[i];
      }
      if (any) {
        for (int f = 0; f < fires; ++f) {
          const int victim = select_dropped_sender(s.windows, rtts,
                                                   transmitting, process.rng());
          if (ev) ev->drops.push_back({s.t, victim});
          SenderPhase& sp = s.senders[victim];
          if (sp.phase == Phase::CongestionAvoidance) {
            sp.phase = Phase::DropNotification;
            sp.timer = static_cast<double>(
                std::max<long>(1, rtt_steps(s.queue, net, victim)));
            sp.span = sp.timer;
          }
        }
      }
    }
  }
  return s;
}

/// Runs the model to t_end with a sample at every step (or every
/// sample_stride steps).
inline Trace simulate(const NetworkConfig& net, const RedParams& red,
                      DropProcess& process, double t_end, ModelState init,
                      int sample_stride = 1) {
  net.validate();
  red.validate();
  if (t_end < init.t) {
    throw std::invalid_argument("simulate: t_end before initial time");
  }
  if (sample_stride < 1) {
    throw std::invalid_argument("simulate: sample_stride >= 1");
  }
  Trace trace;
  trace.source = TraceSource::Discrete;
  trace.has_step_index = true;
  trace.samples.push_back(init);
  const double dt = init.n_senders() * net.packet_interval();
  const long n_steps = static_cast<long>(std::ceil((t_end - init.t) / dt - 1e-9));
  ModelState s = std::move(init);
  StepEvents ev;
  bool clamp_reported = false;
  for (long k = 1; k <= n_steps; ++k) {
    ev.drops.clear();
    ev.queue_clamped = false;
    s = step(std::move(s), net, red, process, &ev);
    for (const auto& d : ev.drops) trace.drops.push_back(d);
    if (ev.queue_clamped && !clamp_reported) {
      trace.diagnostics.push_back(
          "saturation violated: recovery drained an empty queue at t=" +
          std::to_string(s.t));
      clamp_reported = true;
    }
    if (!(std::isfinite(s.queue) && std::isfinite(s.avg_queue))) {
      throw SimulationDiverged(s.t);
    }
    for (double w : s.windows) {
      if (!std::isfinite(w)) throw SimulationDiverged(s.t);
    }
    if (k % sample_stride == 0 || k == n_steps) trace.samples.push_back(s);
  }
  return trace;
}

}  // namespace discrete
}  // namespace tcpred

#endif  // TCPRED_DISCRETE_HPP_
