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
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "helpers.hpp"
#include "tcpred/discrete.hpp"

using namespace tcpred;
using Catch::Approx;

namespace {

ModelState single_state(double w, double q, double x) {
  ModelState s;
  s.windows = {w};
  s.queue = q;
  s.avg_queue = x;
  s.senders.assign(1, SenderPhase{});
  return s;
}

}  // namespace

TEST_CASE("round-trip time in packet steps") {
  const auto net = test::reference_net();
  CHECK(discrete::rtt_steps(50.0, net) == 52);    // nint(1.875 + 50)
  CHECK(discrete::rtt_steps(60.4, net) == 62);    // nint(62.275)
  NetworkConfig unit = test::reference_net({1.0});
  unit.link_bandwidth_bps = 8000.0;  // c = 1, so a equals one packet time
  CHECK(discrete::rtt_steps(0.0, unit) == 1);
}

TEST_CASE("congestion-avoidance step: shared increment, pre-update filter") {
  const auto net = test::reference_net();
  RedParams red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  const ModelState next =
      discrete::step(single_state(2.0, 10.0, 10.0), net, red, none);
  CHECK(next.windows[0] == 2.5);
  CHECK(next.queue == 10.5);
  // filter runs on the queue value before the step's update
  CHECK(next.avg_queue == 10.0);
  CHECK(next.step == 1);
  CHECK(next.t == Approx(net.packet_interval()).epsilon(1e-15));
}

TEST_CASE("notification expiry replaces growth with an exact halving") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(20.0, 30.0, 55.0);
  s.senders[0].phase = Phase::DropNotification;
  s.senders[0].timer = 1.0;
  s.senders[0].span = 5.0;
  const ModelState next = discrete::step(s, net, red, none);
  CHECK(next.windows[0] == 10.0);
  CHECK(next.senders[0].phase == Phase::RecoveryNoSend);
  // queue still gained the pre-cut sender's packet
  CHECK(next.queue == Approx(30.0 + 1.0 / 20.0).epsilon(1e-15));
  const double m = static_cast<double>(discrete::rtt_steps(next.queue, net));
  CHECK(next.senders[0].timer == m);
  CHECK(next.senders[0].span == m);
}

TEST_CASE("window growth continues while the notification is pending") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(20.0, 30.0, 55.0);
  s.senders[0].phase = Phase::DropNotification;
  s.senders[0].timer = 5.0;
  s.senders[0].span = 5.0;
  const ModelState next = discrete::step(s, net, red, none);
  CHECK(next.windows[0] == Approx(20.05).epsilon(1e-15));
  CHECK(next.senders[0].timer == 4.0);
  CHECK(next.senders[0].phase == Phase::DropNotification);
}

TEST_CASE("no-send recovery drains one packet per step with the window held") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(10.0, 30.0, 40.0);
  s.senders[0].phase = Phase::RecoveryNoSend;
  s.senders[0].timer = 20.0;
  s.senders[0].span = 20.0;
  const ModelState next = discrete::step(s, net, red, none);
  CHECK(next.queue == 29.0);
  CHECK(next.windows[0] == 10.0);
  CHECK(next.senders[0].phase == Phase::RecoveryNoSend);
}

TEST_CASE("transmit recovery holds both window and queue") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(10.0, 30.0, 40.0);
  s.senders[0].phase = Phase::RecoveryTransmit;
  s.senders[0].timer = 5.0;
  s.senders[0].span = 20.0;
  const ModelState next = discrete::step(s, net, red, none);
  CHECK(next.queue == 30.0);
  CHECK(next.windows[0] == 10.0);
  CHECK(next.avg_queue == Approx(red.weight * 30.0 + (1 - red.weight) * 40.0)
                              .epsilon(1e-15));
}

TEST_CASE("multi-sender step aggregates per-sender shares") {
  const auto net = test::reference_net({0.01, 0.01});
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s;
  s.windows = {2.0, 4.0};
  s.queue = 10.0;
  s.avg_queue = 10.0;
  s.senders.assign(2, SenderPhase{});
  const ModelState next = discrete::step(s, net, red, none);
  CHECK(next.queue == 10.75);
  CHECK(next.windows[0] == 2.5);
  CHECK(next.windows[1] == 4.25);
  CHECK(next.t == Approx(2.0 * net.packet_interval()).epsilon(1e-15));
}

TEST_CASE("an off sender contributes nothing to the queue") {
  NetworkConfig net = test::reference_net({0.01, 0.01});
  net.senders[1].active = {ActiveInterval{1000.0, 2000.0}};
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s;
  s.windows = {2.0, 4.0};
  s.queue = 10.0;
  s.avg_queue = 10.0;
  s.senders.assign(2, SenderPhase{});
  const ModelState next = discrete::step(s, net, red, none);
  CHECK(next.queue == 10.5);
  CHECK(next.windows[1] == 4.0);
}

TEST_CASE("queue minus window is conserved through congestion avoidance") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    ModelState s = test::random_state(rng);
    const double offset = s.queue - s.windows[0];
    for (int k = 0; k < 10000; ++k) {
      s = discrete::step(std::move(s), net, red, none);
    }
    CHECK(std::abs((s.queue - s.windows[0]) - offset) < 1e-10);
  }
}

TEST_CASE("growth is monotone and the average stays inside the visited range") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(2.0, 5.0, 3.0);
  double lo = std::min(3.0, 5.0), hi = std::max(3.0, 5.0);
  double prev_q = s.queue, prev_w = s.windows[0];
  for (int k = 0; k < 1000; ++k) {
    s = discrete::step(std::move(s), net, red, none);
    REQUIRE(s.queue > prev_q);
    REQUIRE(s.windows[0] > prev_w);
    prev_q = s.queue;
    prev_w = s.windows[0];
    hi = std::max(hi, s.queue);
    REQUIRE(s.avg_queue >= lo);
    REQUIRE(s.avg_queue <= hi);
  }
}

TEST_CASE("a full automaton cycle nets a multiplicative decrease") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess det(DropMode::Deterministic, 0);
  const Trace tr =
      discrete::simulate(net, red, det, 60.0, initial_state(net));
  REQUIRE(!tr.drops.empty());
  const double t_fire = tr.drops.front().t;
  double w_at_fire = 0.0;
  std::size_t idx_fire = 0;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    if (tr.samples[i].t >= t_fire) {
      w_at_fire = tr.samples[i].windows[0];
      idx_fire = i;
      break;
    }
  }
  // find the return to congestion avoidance after the recovery
  bool left_ca = false;
  for (std::size_t i = idx_fire; i < tr.samples.size(); ++i) {
    const Phase ph = tr.samples[i].senders[0].phase;
    if (ph != Phase::CongestionAvoidance) left_ca = true;
    if (left_ca && ph == Phase::CongestionAvoidance) {
      CHECK(tr.samples[i].windows[0] < w_at_fire);
      return;
    }
  }
  FAIL("cycle did not complete");
}

TEST_CASE("no-send lasts floor(m/2) steps and drains the queue by that count") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess det(DropMode::Deterministic, 0);
  const Trace tr =
      discrete::simulate(net, red, det, 60.0, initial_state(net));
  // first no-send sample is the cut step itself (timer still at m)
  std::size_t i = 0;
  while (i < tr.samples.size() &&
         tr.samples[i].senders[0].phase != Phase::RecoveryNoSend) {
    ++i;
  }
  REQUIRE(i < tr.samples.size());
  const double m = tr.samples[i].senders[0].span;
  const double q_at_cut = tr.samples[i].queue;
  std::size_t j = i;
  while (j < tr.samples.size() &&
         tr.samples[j].senders[0].phase == Phase::RecoveryNoSend) {
    ++j;
  }
  REQUIRE(j < tr.samples.size());
  const double drains = std::floor(0.5 * m);
  CHECK(static_cast<double>(j - i) == drains);
  CHECK(tr.samples[j].senders[0].phase == Phase::RecoveryTransmit);
  CHECK(tr.samples[j].queue == Approx(q_at_cut - drains).margin(1e-9));
}

TEST_CASE("recovery drain clamps at an empty queue with a diagnostic") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(30.0, 0.5, 51.0);
  s.senders[0].phase = Phase::DropNotification;
  s.senders[0].timer = 1.0;
  s.senders[0].span = 1.0;
  const Trace tr = discrete::simulate(net, red, none, 0.1, s);
  REQUIRE(!tr.diagnostics.empty());
  bool hit_zero = false;
  for (const auto& smp : tr.samples) hit_zero = hit_zero || smp.queue == 0.0;
  CHECK(hit_zero);
}

TEST_CASE("identical senders stay identical under deterministic drops") {
  const auto net = test::reference_net({0.01, 0.01, 0.01, 0.01});
  const auto red = test::reference_red();
  DropProcess det(DropMode::Deterministic, 0);
  const Trace tr =
      discrete::simulate(net, red, det, 50.0, initial_state(net));
  for (const auto& s : tr.samples) {
    for (int i = 1; i < 4; ++i) REQUIRE(s.windows[i] == s.windows[0]);
  }
}

TEST_CASE("discrete simulate with t_end at the start yields a single sample") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess det(DropMode::Deterministic, 0);
  const Trace tr = discrete::simulate(net, red, det, 0.0, initial_state(net));
  CHECK(tr.samples.size() == 1);
  CHECK(tr.has_step_index);
}
