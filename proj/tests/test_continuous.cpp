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
#include "tcpred/continuous.hpp"

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

TEST_CASE("saturated flow rates at the reference operating point") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  const ModelState s = single_state(30.0, 50.0, 40.0);
  const auto r = continuous::rates(s, net, red, /*saturated=*/true);
  CHECK(r.window_rate[0] == Approx(3.6145).epsilon(1e-3));
  CHECK(r.queue_rate == Approx(-79.07).epsilon(1e-3));
  CHECK(r.avg_queue_rate == Approx(5.625).epsilon(1e-12));
}

TEST_CASE("flow balance: window equal to bdp plus queue gives zero queue rate") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  const double q = 37.0;
  const double w = net.delay(0) * net.capacity() + q;
  const auto r = continuous::rates(single_state(w, q, 20.0), net, red, true);
  CHECK(std::abs(r.queue_rate) < 1e-9);
}

TEST_CASE("average-queue rate vanishes when the average matches the queue") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  const auto r = continuous::rates(single_state(12.0, 33.0, 33.0), net, red, true);
  CHECK(r.avg_queue_rate == 0.0);
}

TEST_CASE("queue and average rates conserve flow") {
  // dq/dt + c equals the total arrival rate, which also drives the filter.
  const auto net = test::reference_net({0.01, 0.02});
  const auto red = test::reference_red();
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const ModelState s = test::random_state(rng, 2);
    const auto r = continuous::rates(s, net, red, true);
    CHECK(r.queue_rate + net.capacity() == Approx(r.inflow).epsilon(1e-12));
  }
}

TEST_CASE("unsaturated rates clamp the outflow at an empty queue") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  ModelState s = single_state(1.0, 0.0, 0.0);  // inflow below capacity
  const auto r = continuous::rates(s, net, red, /*saturated=*/false);
  CHECK(r.queue_rate == 0.0);
  const auto sat = continuous::rates(s, net, red, /*saturated=*/true);
  CHECK(sat.queue_rate < 0.0);
}

TEST_CASE("unit step map worked values") {
  auto net = test::reference_net();
  const auto red = test::reference_red();
  // bdp = a*c = 1.875
  const auto r = continuous::unit_step_map(10.0, 20.0, 0.0, net, red);
  CHECK(r.window == Approx(10.04571).margin(1e-5));
  CHECK(r.queue == Approx(19.45714).margin(1e-5));

  const auto empty = continuous::unit_step_map(10.0, 0.0, 0.0, net, red);
  CHECK(empty.queue == Approx(5.3333).margin(1e-4));

  RedParams zero_w = red;
  zero_w.weight = 0.0;
  const auto held = continuous::unit_step_map(10.0, 20.0, 7.5, net, zero_w);
  CHECK(held.avg_queue == 7.5);
}

TEST_CASE("unit step map rejects multi-sender configurations") {
  const auto net = test::reference_net({0.01, 0.01});
  CHECK_THROWS_AS(continuous::unit_step_map(10, 20, 0, net, test::reference_red()),
                  std::invalid_argument);
}

TEST_CASE("per-packet Euler step reproduces the unit step map bit for bit") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg;
  icfg.step_size = net.packet_interval();
  icfg.saturated = false;
  DropProcess none(DropMode::None, 0);
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    ModelState s = test::random_state(rng);
    double w = s.windows[0], q = s.queue, x = s.avg_queue;
    for (int k = 0; k < 2000; ++k) {
      s = continuous::step(std::move(s), net, red, icfg, none);
      const auto m = continuous::unit_step_map(w, q, x, net, red);
      w = m.window;
      q = m.queue;
      x = m.avg_queue;
      REQUIRE(s.windows[0] == w);
      REQUIRE(s.queue == q);
      REQUIRE(s.avg_queue == x);
    }
  }
}

TEST_CASE("generic Euler path agrees with the per-packet map at h = 1/c") {
  // The reduced form is an algebraic rearrangement for W and q; the averaged
  // queue differs by the filter-rate approximation, bounded here explicitly.
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  const double h = net.packet_interval();
  const double bdp = net.delay(0) * net.capacity();
  Rng rng(123);
  for (int i = 0; i < 200; ++i) {
    ModelState s = test::random_state(rng);
    if (s.queue == 0.0) s.queue = 0.5;
    const auto r = continuous::rates(s, net, red, false);
    const double w_euler = s.windows[0] + h * r.window_rate[0];
    const double q_euler = s.queue + h * r.queue_rate;
    const double x_euler = s.avg_queue + h * r.avg_queue_rate;
    const auto m = continuous::unit_step_map(s.windows[0], s.queue, s.avg_queue,
                                             net, red);
    if (m.queue > 0.0) {  // clamped steps leave the algebraic identity
      CHECK(w_euler == Approx(m.window).epsilon(1e-12));
      CHECK(q_euler == Approx(m.queue).epsilon(1e-9).margin(1e-9));
      const double share = s.windows[0] / (bdp + s.queue);
      const double bound =
          red.weight * std::abs(share - 1.0) * (1.0 + std::abs(s.queue - s.avg_queue)) +
          1e-12;
      CHECK(std::abs(x_euler - m.avg_queue) <= bound);
    }
  }
}

TEST_CASE("notification expiry halves the window and enters recovery") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg = continuous::IntegratorConfig::defaults(net);
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(20.0, 30.0, 55.0);
  s.senders[0].phase = Phase::DropNotification;
  s.senders[0].timer = icfg.step_size;
  s.senders[0].span = icfg.step_size;
  const ModelState next = continuous::step(s, net, red, icfg, none);
  CHECK(next.senders[0].phase == Phase::RecoveryTransmit);
  // the window grew for one step and was then halved
  const double grown = 20.0 + icfg.step_size / rtt(30.0, 0.01, 187.5);
  CHECK(next.windows[0] == Approx(grown / 2.0).epsilon(1e-9));
  CHECK(next.windows[0] == Approx(10.0).margin(0.05));
  CHECK(next.senders[0].timer ==
        Approx(rtt(next.queue, 0.01, 187.5)).epsilon(1e-12));
}

TEST_CASE("the halving impulse leaves the queue and average untouched") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg = continuous::IntegratorConfig::defaults(net);
  DropProcess none(DropMode::None, 0);
  ModelState cut = single_state(20.0, 30.0, 55.0);
  cut.senders[0].phase = Phase::DropNotification;
  cut.senders[0].timer = icfg.step_size;
  cut.senders[0].span = icfg.step_size;
  ModelState plain = cut;
  plain.senders[0] = SenderPhase{};  // same dynamics, no impulse
  const ModelState a = continuous::step(cut, net, red, icfg, none);
  const ModelState b = continuous::step(plain, net, red, icfg, none);
  CHECK(a.queue == b.queue);
  CHECK(a.avg_queue == b.avg_queue);
  CHECK(a.windows[0] != b.windows[0]);
}

TEST_CASE("no transition while the average stays below the threshold") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg = continuous::IntegratorConfig::defaults(net);
  DropProcess det(DropMode::Deterministic, 0);
  ModelState s = single_state(10.0, 20.0, 20.0);
  const ModelState next = continuous::step(s, net, red, icfg, det);
  CHECK(next.senders[0].phase == Phase::CongestionAvoidance);
}

TEST_CASE("deterministic firing notifies the sender and records the drop") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg = continuous::IntegratorConfig::defaults(net);
  DropProcess det(DropMode::Deterministic, 0);
  ModelState s = single_state(30.0, 60.0, 51.0);
  StepEvents ev;
  const ModelState next = continuous::step(s, net, red, icfg, det, &ev);
  CHECK(next.senders[0].phase == Phase::DropNotification);
  REQUIRE(ev.drops.size() == 1);
  CHECK(ev.drops[0].sender == 0);
}

TEST_CASE("windows are held during recovery while the queue keeps evolving") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg = continuous::IntegratorConfig::defaults(net);
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(10.0, 40.0, 40.0);
  s.senders[0].phase = Phase::RecoveryTransmit;
  s.senders[0].timer = 0.5;
  s.senders[0].span = 0.5;
  const ModelState next = continuous::step(s, net, red, icfg, none);
  CHECK(next.windows[0] == 10.0);
  CHECK(next.queue != 40.0);
}

TEST_CASE("windows grow strictly while drops are disabled") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg = continuous::IntegratorConfig::defaults(net);
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(5.0, 10.0, 10.0);
  double prev = s.windows[0];
  for (int i = 0; i < 1000; ++i) {
    s = continuous::step(std::move(s), net, red, icfg, none);
    REQUIRE(s.windows[0] > prev);
    prev = s.windows[0];
  }
}

TEST_CASE("the averaged queue relaxes exponentially toward a held queue") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  const double h = net.packet_interval() / 4.0;
  const double wc = red.weight * net.capacity();
  const double q_star = 60.0;
  double x = 20.0;
  const double t_total = 1.5;
  const long steps = std::lround(t_total / h);
  for (long k = 0; k < steps; ++k) {
    ModelState s = single_state(10.0, q_star, x);
    const auto r = continuous::rates(s, net, red, true);
    x += h * r.avg_queue_rate;
  }
  const double expected = std::abs(20.0 - q_star) * std::exp(-wc * t_total);
  CHECK(std::abs(x - q_star) <= expected * (1.0 + 2.0 * h * wc) + 1e-9);
}

TEST_CASE("simulate with t_end at the start yields a single sample") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess det(DropMode::Deterministic, 0);
  const Trace tr = continuous::simulate(
      net, red, continuous::IntegratorConfig::defaults(net), det, 0.0,
      initial_state(net));
  CHECK(tr.samples.size() == 1);
  CHECK(tr.drops.empty());
}

TEST_CASE("two identical senders evolve identically") {
  const auto net = test::reference_net({0.01, 0.01});
  const auto red = test::reference_red();
  DropProcess det(DropMode::Deterministic, 0);
  const Trace tr = continuous::simulate(
      net, red, continuous::IntegratorConfig::defaults(net), det, 40.0,
      initial_state(net));
  for (const auto& s : tr.samples) {
    REQUIRE(s.windows[0] == s.windows[1]);
  }
}

TEST_CASE("a non-finite state reports the divergence time") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess none(DropMode::None, 0);
  ModelState bad = single_state(1e308, 10.0, 10.0);
  try {
    continuous::simulate(net, red, continuous::IntegratorConfig::defaults(net),
                         none, 1.0, bad);
    FAIL("expected SimulationDiverged");
  } catch (const SimulationDiverged& e) {
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
  }
}

TEST_CASE("reference run produces a bounded sawtooth") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  DropProcess det(DropMode::Deterministic, 0);
  const Trace tr = continuous::simulate(
      net, red, continuous::IntegratorConfig::defaults(net), det, 100.0,
      initial_state(net));
  double qmin = 1e9, qmax = -1e9;
  for (const auto& s : tr.samples) {
    if (s.t < 20.0) continue;
    qmin = std::min(qmin, s.queue);
    qmax = std::max(qmax, s.queue);
  }
  CHECK(qmin > 0.0);
  CHECK(qmax < red.max_thresh);
  CHECK(tr.drops.size() >= 3);
}

TEST_CASE("halving the step changes the mid-run queue by less than 1%") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  auto run = [&](double h) {
    continuous::IntegratorConfig icfg;
    icfg.step_size = h;
    DropProcess det(DropMode::Deterministic, 0);
    const Trace tr =
        continuous::simulate(net, red, icfg, det, 50.0, initial_state(net));
    return tr.samples.back().queue;
  };
  const double qa = run(net.packet_interval() / 4.0);
  const double qb = run(net.packet_interval() / 8.0);
  CHECK(std::abs(qa - qb) / std::max(std::abs(qb), 1.0) < 0.01);
}

TEST_CASE("optional no-send emulation drains the queue at capacity") {
  const auto net = test::reference_net();
  const auto red = test::reference_red();
  continuous::IntegratorConfig icfg = continuous::IntegratorConfig::defaults(net);
  icfg.emulate_no_send = true;
  DropProcess none(DropMode::None, 0);
  ModelState s = single_state(20.0, 40.0, 55.0);
  s.senders[0].phase = Phase::DropNotification;
  s.senders[0].timer = icfg.step_size;
  s.senders[0].span = icfg.step_size;
  ModelState next = continuous::step(s, net, red, icfg, none);
  REQUIRE(next.senders[0].phase == Phase::RecoveryNoSend);
  const double q_before = next.queue;
  next = continuous::step(next, net, red, icfg, none);
  CHECK(next.queue == Approx(q_before - net.capacity() * icfg.step_size)
                          .epsilon(1e-9));
}
