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
#ifndef TCPRED_CONFIG_HPP_
#define TCPRED_CONFIG_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tcpred {

/// Bottleneck capacity in packets per second from the link rate and the
/// (uniform) packet size.
inline double capacity_pps(double link_bandwidth_bps, double packet_size_bytes) {
  if (!(link_bandwidth_bps > 0.0) || !(packet_size_bytes > 0.0)) {
    throw std::invalid_argument(
        "capacity_pps: link bandwidth and packet size must be positive");
  }
  return link_bandwidth_bps / (8.0 * packet_size_bytes);
}

/// A half-open interval [on, off) during which a sender transmits.
struct ActiveInterval {
  double on = 0.0;
  double off = kForever;
  static constexpr double kForever = 1e30;
};

struct SenderConfig {
  double delay = 0.01;  // fixed propagation delay a_i, seconds
  std::vector<ActiveInterval> active = {ActiveInterval{}};

  bool is_active(double t) const {
    for (const auto& iv : active) {
      if (t >= iv.on && t < iv.off) return true;
    }
    return false;
  }
};

/// RED parameters. Thresholds and the averaged queue are in packets.
struct RedParams {
  double min_thresh = 50.0;   // queue average at which dropping can start
  double max_thresh = 100.0;  // queue average at which dropping saturates
  double max_prob = 0.1;      // drop probability at max_thresh
  double weight = 0.003;      // EWMA weight for the averaged queue
  bool wait_mode = true;      // enforce a minimum packet count between drops

  void validate() const {
    if (!(min_thresh > 0.0) || !(min_thresh < max_thresh)) {
      throw std::invalid_argument("RedParams: need 0 < min_thresh < max_thresh");
    }
    if (!(max_prob > 0.0) || !(max_prob <= 1.0)) {
      throw std::invalid_argument("RedParams: need 0 < max_prob <= 1");
    }
    if (!(weight > 0.0) || !(weight < 1.0)) {
      throw std::invalid_argument("RedParams: need 0 < weight < 1");
    }
  }
};

/// Topology: N bulk-transfer senders sharing one bottleneck router. All
/// internal quantities are in packets and seconds; bits and bytes appear
/// only here, at the configuration boundary.
struct NetworkConfig {
  double link_bandwidth_bps = 1.5e6;
  double packet_size_bytes = 1000.0;
  std::vector<SenderConfig> senders = {SenderConfig{}};

  /// Bottleneck capacity c, packets/second (derived).
  double capacity() const {
    return capacity_pps(link_bandwidth_bps, packet_size_bytes);
  }

  /// Packet spacing delta = 1/c imposed by the bottleneck, seconds (derived).
  double packet_interval() const { return 1.0 / capacity(); }

  int n_senders() const { return static_cast<int>(senders.size()); }

  double delay(int sender) const { return senders.at(sender).delay; }

  bool is_active(int sender, double t) const {
    return senders.at(sender).is_active(t);
  }

  void validate() const {
    capacity();  // checks bandwidth and packet size
    if (senders.empty()) {
      throw std::invalid_argument("NetworkConfig: at least one sender required");
    }
    for (const auto& s : senders) {
      if (!(s.delay > 0.0)) {
        throw std::invalid_argument("NetworkConfig: sender delay must be positive");
      }
      for (const auto& iv : s.active) {
        if (!(iv.on < iv.off)) {
          throw std::invalid_argument("NetworkConfig: empty active interval");
        }
      }
    }
  }
};

}  // namespace tcpred

#endif  // TCPRED_CONFIG_HPP_
