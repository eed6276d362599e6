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
#ifndef TCPRED_TESTS_HELPERS_HPP_
#define TCPRED_TESTS_HELPERS_HPP_

#include <vector>

#include "tcpred/config.hpp"
#include "tcpred/rng.hpp"
#include "tcpred/state.hpp"

namespace tcpred::test {

// Reference parameter set: 1.5 Mbps bottleneck, 1000-byte packets
// (c = 187.5 pkt/s), RED 50/100/0.1/0.003, 10 ms delay unless overridden.
inline NetworkConfig reference_net(std::vector<double> delays = {0.01}) {
  NetworkConfig net;
  net.link_bandwidth_bps = 1.5e6;
  net.packet_size_bytes = 1000.0;
  net.senders.clear();
  for (double d : delays) net.senders.push_back(SenderConfig{d, {ActiveInterval{}}});
  return net;
}

inline RedParams reference_red() { return RedParams{}; }

inline ModelState random_state(Rng& rng, int n_senders = 1) {
  ModelState s;
  for (int i = 0; i < n_senders; ++i) {
    s.windows.push_back(rng.uniform(1.0, 100.0));
  }
  s.queue = rng.uniform(0.0, 150.0);
  s.avg_queue = rng.uniform(0.0, 150.0);
  s.senders.assign(n_senders, SenderPhase{});
  return s;
}

}  // namespace tcpred::test

#endif  // TCPRED_TESTS_HELPERS_HPP_
