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
#ifndef TCPRED_DROP_HPP_
#define TCPRED_DROP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tcpred/config.hpp"
#include "tcpred/rng.hpp"
#include "tcpred/state.hpp"

namespace tcpred {

/// Idealized deterministic dropping: a drop is assumed the moment the
/// averaged queue exceeds the lower RED threshold.
inline bool deterministic_fire(double avg_queue, const RedParams& red) {
  return avg_queue > red.min_thresh;
}

/// Drop probability actually applied per packet when the router spaces
/// drops out with a packet counter k (packets seen since the counter was
/// last reset): zero for the first 1/p packets, then an increasing hazard
/// that forces a drop by 2/p packets. With constant p this makes inter-drop
/// counts uniform on [1/p, 2/p).
inline double red_counter_probability(double k, double p) {
  const double kp = k * p;
  if (kp < 1.0) return 0.0;
  if (kp < 2.0) return std::min(p / (2.0 - kp), 1.0);
  return 1.0;
}

/// Linearization of the per-packet drop probability while the averaging
/// filter relaxes from x0 toward q0: p(k) = slope*k + intercept for the
/// k-th packet after the counter reset.
struct InterdropCoefficients {
  double slope = 0.0;      // a1
  double intercept = 0.0;  // a2
};

inline InterdropCoefficients interdrop_coefficients(double queue0, double avg0,
                                                    const RedParams& red) {
  const double ramp = red.max_thresh - red.min_thresh;
  return InterdropCoefficients{
      red.max_prob * red.weight * (queue0 - avg0) / ramp,
      red.max_prob * (avg0 - red.min_thresh) / ramp,
  };
}

/// Expected packet count until the next drop: the root of
/// k = 3/(2*(slope*k + intercept)), written in conjugate form
/// 3/(intercept + sqrt(intercept^2 + 6*slope)) so it stays finite as the
/// slope vanishes. Returns nullopt when the discriminant is negative (the
/// probability decays to zero before a drop) or the ramp is identically
/// zero.
inline std::optional<double> interdrop_root(double slope, double intercept) {
  const double disc = intercept * intercept + 6.0 * slope;
  if (disc < 0.0) return std::nullopt;
  const double denom = intercept + std::sqrt(disc);
  if (!(denom > 0.0)) return std::nullopt;
  return 3.0 / denom;
}

inline std::optional<double> expected_interdrop(double queue0, double avg0,
                                                const RedParams& red) {
  const auto co = interdrop_coefficients(queue0, avg0, red);
  return interdrop_root(co.slope, co.intercept);
}

/// Picks the sender whose packet is dropped, with probability proportional
/// to its share W_i/R_i of the total flow. Senders flagged inactive are
/// excluded.
inline int select_dropped_sender(const std::vector<double>& windows,
                                 const std::vector<double>& rtts,
                                 const std::vector<bool>& transmitting, Rng& rng) {
  double total = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (transmitting[i]) total += windows[i] / rtts[i];
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument("select_dropped_sender: no transmitting sender");
  }
  double u = rng.uniform() * total;
  int last = -1;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!transmitting[i]) continue;
    last = static_cast<int>(i);
    u -= windows[i] / rtts[i];
    if (u < 0.0) return last;
  }
  return last;  // u landed on the accumulated rounding at the tail
}

enum class DropMode { None, Deterministic, ExpectedInterdrop, FullRed };

inline const char* to_string(DropMode m) {
  switch (m) {
    case DropMode::None: return "none";
    case DropMode::Deterministic: return "deterministic";
    case DropMode::ExpectedInterdrop: return "interdrop";
    case DropMode::FullRed: return "full-red";
  }
  return "unknown";
}

inline DropMode drop_mode_from_string(const std::string& s) {
  if (s == "none") return DropMode::None;
  if (s == "deterministic") return DropMode::Deterministic;
  if (s == "interdrop") return DropMode::ExpectedInterdrop;
  if (s == "full-red") return DropMode::FullRed;
  throw std::invalid_argument("unknown drop mode: " + s);
}

/// Router-side drop machinery, owned by one simulation run. The process
/// arms when the averaged queue exceeds min_thresh, counts packet arrivals
/// while armed, and disarms (counter cleared) when the average falls back
/// below. Only FullRed consumes randomness.
class DropProcess {
 public:
  DropProcess() = default;
  DropProcess(DropMode mode, std::uint64_t seed, std::uint64_t stream = 0)
      : mode_(mode), rng_(seed, stream) {}

  DropMode mode() const { return mode_; }
  bool armed() const { return armed_; }
  double counter() const { return counter_; }
  std::optional<double> pending_target() const { return target_; }
  Rng& rng() { return rng_; }

  /// Replaces the random stream without touching the counting state.
  void reseed(std::uint64_t seed, std::uint64_t stream = 0) {
    rng_ = Rng(seed, stream);
  }

  /// Advances the process by `packets` arrivals with the router observing
  /// (queue, avg_queue). Returns how many drops fired within the batch.
  int on_arrivals(double packets, double queue, double avg_queue,
                  const RedParams& red) {
    switch (mode_) {
      case DropMode::None:
        return 0;
      case DropMode::Deterministic:
        return deterministic_fire(avg_queue, red) ? 1 : 0;
      case DropMode::ExpectedInterdrop:
      case DropMode::FullRed:
        break;
    }
    if (!update_armed(queue, avg_queue, red)) return 0;
    if (mode_ == DropMode::ExpectedInterdrop) {
      counter_ += packets;
      int fires = 0;
      while (target_ && counter_ >= *target_) {
        ++fires;
        counter_ -= *target_;
        target_ = expected_interdrop(queue, avg_queue, red);
      }
      return fires;
    }
    // FullRed: one Bernoulli trial per whole arrived packet.
    accum_ += packets;
    const double p = red_drop_probability(avg_queue, red);
    int fires = 0;
    while (accum_ >= 1.0 - 1e-9) {
      accum_ -= 1.0;
      counter_ += 1.0;
      const double p_drop =
          red.wait_mode ? red_counter_probability(counter_, p) : p;
      if (p_drop > 0.0 && rng_.uniform() < p_drop) {
        ++fires;
        counter_ = 0.0;
      }
    }
    return fires;
  }

 private:
  bool update_armed(double queue, double avg_queue, const RedParams& red) {
    if (!armed_) {
      if (avg_queue > red.min_thresh) {
        armed_ = true;
        counter_ = 0.0;
        accum_ = 0.0;
        if (mode_ == DropMode::ExpectedInterdrop) {
          target_ = expected_interdrop(queue, avg_queue, red);
        }
      }
      return armed_;
    }
    if (avg_queue < red.min_thresh) {
      armed_ = false;
      counter_ = 0.0;
      accum_ = 0.0;
      target_.reset();
      return false;
    }
    return true;
  }

  DropMode mode_ = DropMode::None;
  Rng rng_;
  bool armed_ = false;
  double counter_ = 0.0;
  double accum_ = 0.0;  // fractional packet arrivals not yet accounted
  std::optional<double> target_;
};

}  // namespace tcpred

#endif  // TCPRED_DROP_HPP_
