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
#ifndef TCPRED_FILTER_HPP_
#define TCPRED_FILTER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tcpred/config.hpp"
#include "tcpred/discrete.hpp"
#include "tcpred/drop.hpp"
#include "tcpred/rng.hpp"
#include "tcpred/state.hpp"

namespace tcpred {
namespace filter {

// Sequential Monte Carlo state estimation over the discrete-time model:
// particles carry a full model state plus their own stochastic drop process,
// are advanced through the model between observations, reweighted with
// Gaussian likelihoods on the observed channels, and resampled
// systematically when the effective sample size degenerates.

/// Partial observation of the network state at one instant. Window channels
/// observe individual sender windows; the optional round-trip channel is
/// compared against the queueing-delay relation applied to the particle
/// queue.
struct Observation {
  double time = 0.0;
  std::vector<std::pair<int, double>> windows;  // (sender index, packets)
  double window_noise_std = 1.0;
  std::optional<std::pair<int, double>> round_trip;  // (sender index, seconds)
  double rtt_noise_std = 0.01;

  void validate() const {
    if (windows.empty() && !round_trip) {
      throw std::invalid_argument("Observation: no channel present");
    }
    if (!windows.empty() && !(window_noise_std > 0.0)) {
      throw std::invalid_argument("Observation: window noise must be positive");
    }
    if (round_trip && !(rtt_noise_std > 0.0)) {
      throw std::invalid_argument("Observation: rtt noise must be positive");
    }
  }
};

/// Uniform prior ranges for the initial ensemble.
struct PriorSpec {
  std::array<double, 2> window_range{1.0, 20.0};
  std::array<double, 2> queue_range{0.0, 120.0};
  std::array<double, 2> avg_queue_range{0.0, 120.0};

  void validate() const {
    for (const auto& r : {window_range, queue_range, avg_queue_range}) {
      if (!(r[0] <= r[1])) {
        throw std::invalid_argument("PriorSpec: range lo must be <= hi");
      }
    }
    if (!(window_range[0] >= 1.0)) {
      throw std::invalid_argument("PriorSpec: windows start at 1 packet");
    }
    if (!(queue_range[0] >= 0.0) || !(avg_queue_range[0] >= 0.0)) {
      throw std::invalid_argument("PriorSpec: queues are nonnegative");
    }
  }

  double mean_queue() const { return 0.5 * (queue_range[0] + queue_range[1]); }
};

struct Particle {
  ModelState state;
  DropProcess drops;
};

struct Ensemble {
  std::vector<Particle> particles;
  std::vector<double> weights;
  std::vector<std::string> diagnostics;

  int size() const { return static_cast<int>(particles.size()); }

  double effective_sample_size() const {
    double ss = 0.0;
    for (double w : weights) ss += w * w;
    return ss > 0.0 ? 1.0 / ss : 0.0;
  }
};

/// Draws `n` particles independently and uniformly from the prior ranges,
/// with uniform weights. Each particle gets its own drop-process stream.
inline Ensemble init_ensemble(int n, const PriorSpec& prior,
                              const NetworkConfig& net, std::uint64_t seed,
                              DropMode mode = DropMode::FullRed) {
  if (n < 2) throw std::invalid_argument("init_ensemble: need at least 2 particles");
  prior.validate();
  Ensemble ens;
  Rng draw(seed, 0);
  ens.particles.reserve(n);
  const int ns = net.n_senders();
  for (int p = 0; p < n; ++p) {
    Particle part;
    part.state.windows.resize(ns);
    for (int i = 0; i < ns; ++i) {
      part.state.windows[i] =
          draw.uniform(prior.window_range[0], prior.window_range[1]);
    }
    part.state.queue = draw.uniform(prior.queue_range[0], prior.queue_range[1]);
    part.state.avg_queue =
        draw.uniform(prior.avg_queue_range[0], prior.avg_queue_range[1]);
    part.state.senders.assign(ns, SenderPhase{});
    part.drops = DropProcess(mode, seed, static_cast<std::uint64_t>(p) + 1);
    ens.particles.push_back(std::move(part));
  }
  ens.weights.assign(n, 1.0 / static_cast<double>(n));
  if (prior.window_range[0] == prior.window_range[1] &&
      prior.queue_range[0] == prior.queue_range[1] &&
      prior.avg_queue_range[0] == prior.avg_queue_range[1]) {
    ens.diagnostics.push_back("degenerate prior: all particles identical");
  }
  return ens;
}

/// Number of discrete-model steps covering `dt` seconds; throws unless dt is
/// an integer multiple of the model step n*delta.
inline long steps_for(double dt, const NetworkConfig& net) {
  const double step = net.n_senders() * net.packet_interval();
  const double ratio = dt / step;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-6) {
    throw std::invalid_argument("advance: dt is not a multiple of the model step");
  }
  return steps;
}

/// Advances every particle through the discrete model; weights unchanged.
inline void advance(Ensemble& ens, const NetworkConfig& net,
                    const RedParams& red, long steps) {
  if (steps < 0) throw std::invalid_argument("advance: negative step count");
  for (auto& p : ens.particles) {
    for (long k = 0; k < steps; ++k) {
      p.state = discrete::step(std::move(p.state), net, red, p.drops);
    }
  }
}

inline void advance_seconds(Ensemble& ens, const NetworkConfig& net,
                            const RedParams& red, double dt) {
  advance(ens, net, red, steps_for(dt, net));
}

enum class AssimilateResult { Reweighted, Resampled, DegenerateReset };

namespace detail {

inline double log_likelihood(const Particle& p, const Observation& obs,
                             const NetworkConfig& net) {
  double ll = 0.0;
  for (const auto& [idx, value] : obs.windows) {
    const double d = (p.state.windows.at(idx) - value) / obs.window_noise_std;
    ll -= 0.5 * d * d;
  }
  if (obs.round_trip) {
    const auto& [idx, value] = *obs.round_trip;
    const double predicted = rtt(p.state.queue, net.delay(idx), net.capacity());
    const double d = (predicted - value) / obs.rtt_noise_std;
    ll -= 0.5 * d * d;
  }
  return ll;
}

/// Systematic resampling: N equally spaced positions through the cumulative
/// weights. Children of the same parent get fresh drop-process streams so
/// they decorrelate going forward.
inline void systematic_resample(Ensemble& ens, Rng& rng) {
  const int n = ens.size();
  std::vector<Particle> next;
  next.reserve(n);
  const double u0 = rng.uniform() / static_cast<double>(n);
  double cum = 0.0;
  int j = -1;
  for (int i = 0; i < n; ++i) {
    const double u = u0 + static_cast<double>(i) / static_cast<double>(n);
    while (cum < u && j + 1 < n) {
      ++j;
      cum += ens.weights[j];
    }
    next.push_back(ens.particles[std::max(j, 0)]);
    next.back().drops.reseed(rng.next_u64());
  }
  ens.particles = std::move(next);
  ens.weights.assign(n, 1.0 / static_cast<double>(n));
}

}  // namespace detail

/// Reweights the ensemble by the observation likelihood (independent
/// Gaussian channels), then resamples if the effective sample size fell
/// below half the ensemble. A fully inconsistent observation (all
/// likelihoods underflow) resets the weights to uniform.
inline AssimilateResult assimilate(Ensemble& ens, const Observation& obs,
                                   const NetworkConfig& net, Rng& rng) {
  obs.validate();
  const int n = ens.size();
  if (n == 0) throw std::invalid_argument("assimilate: empty ensemble");
  std::vector<double> ll(n);
  double max_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    ll[i] = detail::log_likelihood(ens.particles[i], obs, net);
    max_ll = std::max(max_ll, ll[i]);
  }
  double total = 0.0;
  if (std::isfinite(max_ll)) {
    for (int i = 0; i < n; ++i) {
      ens.weights[i] *= std::exp(ll[i] - max_ll);
      total += ens.weights[i];
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    ens.weights.assign(n, 1.0 / static_cast<double>(n));
    ens.diagnostics.push_back("filter divergence: weights reset to uniform");
    return AssimilateResult::DegenerateReset;
  }
  for (double& w : ens.weights) w /= total;
  if (ens.effective_sample_size() < 0.5 * static_cast<double>(n)) {
    detail::systematic_resample(ens, rng);
    return AssimilateResult::Resampled;
  }
  return AssimilateResult::Reweighted;
}

/// Weighted summary of the ensemble: per-field mean and standard deviation,
/// with the phase reported as the modal aggregate phase.
struct EstimateSummary {
  double t = 0.0;
  std::vector<double> window_mean;
  std::vector<double> window_std;
  double queue_mean = 0.0;
  double queue_std = 0.0;
  double avg_queue_mean = 0.0;
  double avg_queue_std = 0.0;
  Phase modal_phase = Phase::CongestionAvoidance;
};

inline EstimateSummary estimate(const Ensemble& ens) {
  if (ens.size() == 0) throw std::invalid_argument("estimate: empty ensemble");
  const int n = ens.size();
  const int ns = ens.particles.front().state.n_senders();
  EstimateSummary out;
  out.t = ens.particles.front().state.t;
  out.window_mean.assign(ns, 0.0);
  out.window_std.assign(ns, 0.0);
  std::array<double, 4> phase_mass{};
  for (int i = 0; i < n; ++i) {
    const double w = ens.weights[i];
    const ModelState& s = ens.particles[i].state;
    for (int j = 0; j < ns; ++j) out.window_mean[j] += w * s.windows[j];
    out.queue_mean += w * s.queue;
    out.avg_queue_mean += w * s.avg_queue;
    phase_mass[static_cast<int>(s.aggregate_phase())] += w;
  }
  for (int i = 0; i < n; ++i) {
    const double w = ens.weights[i];
    const ModelState& s = ens.particles[i].state;
    for (int j = 0; j < ns; ++j) {
      const double d = s.windows[j] - out.window_mean[j];
      out.window_std[j] += w * d * d;
    }
    const double dq = s.queue - out.queue_mean;
    out.queue_std += w * dq * dq;
    const double dx = s.avg_queue - out.avg_queue_mean;
    out.avg_queue_std += w * dx * dx;
  }
  for (double& v : out.window_std) v = std::sqrt(v);
  out.queue_std = std::sqrt(out.queue_std);
  out.avg_queue_std = std::sqrt(out.avg_queue_std);
  int best = 0;
  for (int p = 1; p < 4; ++p) {
    if (phase_mass[p] > phase_mass[best]) best = p;
  }
  out.modal_phase = static_cast<Phase>(best);
  return out;
}

}  // namespace filter
}  // namespace tcpred

#endif  // TCPRED_FILTER_HPP_
