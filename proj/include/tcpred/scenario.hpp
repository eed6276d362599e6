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
#ifndef TCPRED_SCENARIO_HPP_
#define TCPRED_SCENARIO_HPP_

#include <stdexcept>
#include <string>

#include "tcpred/config.hpp"
#include "tcpred/drop.hpp"

namespace tcpred {

/// Named experiment presets on the reference bottleneck (1.5 Mbps link,
/// 1000-byte packets, RED 50/100/0.1/0.003).
struct Scenario {
  std::string name;
  NetworkConfig net;
  RedParams red;
  DropMode drop_mode = DropMode::Deterministic;
  double t_end = 100.0;
};

inline Scenario make_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  sc.net.link_bandwidth_bps = 1.5e6;
  sc.net.packet_size_bytes = 1000.0;
  if (name == "one-sender") {
    sc.net.senders = {SenderConfig{0.010, {ActiveInterval{}}}};
    sc.drop_mode = DropMode::Deterministic;
    sc.t_end = 100.0;
  } else if (name == "two-senders") {
    sc.net.senders = {SenderConfig{0.010, {ActiveInterval{}}},
                      SenderConfig{0.010, {ActiveInterval{}}}};
    sc.drop_mode = DropMode::Deterministic;
    sc.t_end = 100.0;
  } else if (name == "four-senders") {
    sc.net.senders = {SenderConfig{0.010, {ActiveInterval{}}},
                      SenderConfig{0.020, {ActiveInterval{}}},
                      SenderConfig{0.030, {ActiveInterval{}}},
                      SenderConfig{0.040, {ActiveInterval{}}}};
    sc.drop_mode = DropMode::FullRed;
    sc.t_end = 100.0;
  } else if (name == "two-classes") {
    // Five senders at 20 ms, five at 35 ms; the slower class pauses
    // between t=75 s and t=125 s.
    sc.net.senders.clear();
    for (int i = 0; i < 5; ++i) {
      sc.net.senders.push_back(SenderConfig{0.020, {ActiveInterval{}}});
    }
    for (int i = 0; i < 5; ++i) {
      sc.net.senders.push_back(SenderConfig{
          0.035,
          {ActiveInterval{0.0, 75.0},
           ActiveInterval{125.0, ActiveInterval::kForever}}});
    }
    sc.drop_mode = DropMode::FullRed;
    sc.t_end = 200.0;
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  return sc;
}

}  // namespace tcpred

#endif  // TCPRED_SCENARIO_HPP_
