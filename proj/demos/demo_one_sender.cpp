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

// Runs the one-sender reference scenario through all three simulators and
// prints the queue statistics and oscillation period of each.

#include <cstdio>

#include "tcpred/analysis.hpp"
#include "tcpred/continuous.hpp"
#include "tcpred/discrete.hpp"
#include "tcpred/oracle.hpp"
#include "tcpred/scenario.hpp"

int main() {
  using namespace tcpred;
  const Scenario sc = make_scenario("one-sender");

  auto describe = [&](const char* name, const Trace& trace) {
    const auto stats = analysis::queue_stats(trace, 20.0, sc.t_end);
    double period = 0.0;
    try {
      period = analysis::oscillation_period(trace, 10.0, sc.t_end);
    } catch (const std::domain_error&) {
    }
    std::printf("%-12s queue mean %6.2f  stdev %5.2f  period %5.2f s  drops %zu\n",
                name, stats.mean, stats.stdev, period, trace.drops.size());
  };

  DropProcess det_c(DropMode::Deterministic, 0);
  describe("continuous",
           continuous::simulate(sc.net, sc.red,
                                continuous::IntegratorConfig::defaults(sc.net),
                                det_c, sc.t_end, initial_state(sc.net)));

  DropProcess det_d(DropMode::Deterministic, 0);
  describe("discrete", discrete::simulate(sc.net, sc.red, det_d, sc.t_end,
                                          initial_state(sc.net)));

  describe("oracle", oracle::run(sc.net, sc.red, sc.t_end, 1));
  return 0;
}
