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
#ifndef TCPRED_ANALYSIS_HPP_
#define TCPRED_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "tcpred/state.hpp"
#include "tcpred/trace.hpp"

namespace tcpred {
namespace analysis {

struct QueueStats {
  double mean = 0.0;
  double stdev = 0.0;
  long count = 0;
};

/// Sample mean and sample standard deviation of the instantaneous queue over
/// [t_start, t_end).
inline QueueStats queue_stats(const Trace& trace, double t_start, double t_end) {
  double sum = 0.0;
  long n = 0;
  for (const auto& s : trace.samples) {
    if (s.t >= t_start && s.t < t_end) {
      sum += s.queue;
      ++n;
    }
  }
  if (n < 2) throw std::domain_error("queue_stats: fewer than 2 samples in window");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& s : trace.samples) {
    if (s.t >= t_start && s.t < t_end) {
      const double d = s.queue - mean;
      ss += d * d;
    }
  }
  return {mean, std::sqrt(ss / static_cast<double>(n - 1)), n};
}

/// Queue histogram: values rounded to the nearest packet, then binned.
/// Keys are bin indices (value ~ key * bin_width); counts sum to the number
/// of samples in the window.
inline std::map<long, long> queue_histogram(
    const Trace& trace, double bin_width,
    double t_start = -std::numeric_limits<double>::infinity(),
    double t_end = std::numeric_limits<double>::infinity()) {
  if (!(bin_width > 0.0)) {
    throw std::invalid_argument("queue_histogram: bin_width must be positive");
  }
  std::map<long, long> bins;
  for (const auto& s : trace.samples) {
    if (s.t < t_start || s.t >= t_end) continue;
    const double rounded = static_cast<double>(std::llround(s.queue));
    bins[static_cast<long>(std::floor(rounded / bin_width))] += 1;
  }
  return bins;
}

/// L1 distance between two histograms viewed as probability vectors.
inline double histogram_l1(const std::map<long, long>& a,
                           const std::map<long, long>& b) {
  double na = 0.0, nb = 0.0;
  for (const auto& [k, v] : a) na += static_cast<double>(v);
  for (const auto& [k, v] : b) nb += static_cast<double>(v);
  if (na == 0.0 || nb == 0.0) {
    throw std::domain_error("histogram_l1: empty histogram");
  }
  double d = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      d += static_cast<double>(ia->second) / na;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      d += static_cast<double>(ib->second) / nb;
      ++ib;
    } else {
      d += std::abs(static_cast<double>(ia->second) / na -
                    static_cast<double>(ib->second) / nb);
      ++ia;
      ++ib;
    }
  }
  return d;
}

inline std::pair<long, long> histogram_support(const std::map<long, long>& h) {
  if (h.empty()) throw std::domain_error("histogram_support: empty histogram");
  return {h.begin()->first, h.rbegin()->first};
}

/// Per-sample round-trip times; each row is {t, R_1, ..., R_n}.
inline std::vector<std::vector<double>> rtt_series(const Trace& trace,
                                                   const NetworkConfig& net) {
  const double c = net.capacity();
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    std::vector<double> row;
    row.reserve(1 + net.senders.size());
    row.push_back(s.t);
    for (int i = 0; i < net.n_senders(); ++i) {
      row.push_back(rtt(s.queue, net.delay(i), c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

struct Peak {
  std::size_t index;
  double t;
  double value;
};

/// Local maxima of the queue series (plateaus collapse to their first
/// sample) with prominence measured against the nearest higher samples on
/// each side.
inline std::vector<Peak> prominent_peaks(const std::vector<ModelState>& s,
                                         std::size_t lo, std::size_t hi,
                                         double min_prominence) {
  std::vector<Peak> peaks;
  std::size_t i = lo + 1;
  while (i + 1 < hi) {
    if (!(s[i].queue > s[i - 1].queue)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < hi && s[j + 1].queue == s[i].queue) ++j;
    if (j + 1 < hi && s[j + 1].queue < s[i].queue) {
      const double v = s[i].queue;
      double left_min = v;
      for (std::size_t k = i; k-- > lo;) {
        if (s[k].queue > v) break;
        left_min = std::min(left_min, s[k].queue);
      }
      double right_min = v;
      for (std::size_t k = j + 1; k < hi; ++k) {
        if (s[k].queue > v) break;
        right_min = std::min(right_min, s[k].queue);
      }
      if (v - std::max(left_min, right_min) >= min_prominence) {
        peaks.push_back({i, s[i].t, v});
      }
    }
    i = j + 1;
  }
  return peaks;
}

}  // namespace detail

/// Mean spacing between successive prominent queue maxima within
/// [t_start, t_end); the prominence threshold is a fraction of the queue
/// range over the window.
inline double oscillation_period(
    const Trace& trace,
    double t_start = -std::numeric_limits<double>::infinity(),
    double t_end = std::numeric_limits<double>::infinity(),
    double prominence_frac = 0.25) {
  const auto& s = trace.samples;
  std::size_t lo = 0;
  while (lo < s.size() && s[lo].t < t_start) ++lo;
  std::size_t hi = s.size();
  while (hi > lo && s[hi - 1].t >= t_end) --hi;
  if (hi - lo < 3) throw std::domain_error("oscillation_period: window too short");
  double qmin = s[lo].queue, qmax = s[lo].queue;
  for (std::size_t k = lo; k < hi; ++k) {
    qmin = std::min(qmin, s[k].queue);
    qmax = std::max(qmax, s[k].queue);
  }
  const auto peaks =
      detail::prominent_peaks(s, lo, hi, prominence_frac * (qmax - qmin));
  if (peaks.size() < 3) {
    throw std::domain_error("oscillation_period: fewer than 3 cycles detected");
  }
  double total = 0.0;
  for (std::size_t k = 1; k < peaks.size(); ++k) {
    total += peaks[k].t - peaks[k - 1].t;
  }
  return total / static_cast<double>(peaks.size() - 1);
}

}  // namespace analysis
}  // namespace tcpred

#endif  // TCPRED_ANALYSIS_HPP_
