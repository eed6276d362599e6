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
#ifndef TCPRED_TRACE_HPP_
#define TCPRED_TRACE_HPP_

#include <charconv>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tcpred/state.hpp"

namespace tcpred {

enum class TraceSource { Continuous, Discrete, Oracle };

inline const char* to_string(TraceSource s) {
  switch (s) {
    case TraceSource::Continuous: return "continuous";
    case TraceSource::Discrete: return "discrete";
    case TraceSource::Oracle: return "oracle";
  }
  return "unknown";
}

struct DropEvent {
  double t = 0.0;
  int sender = 0;
};

/// Uniform time-series record produced by all three simulators.
/// Columns: t [, k], W_1..W_n, q, x, phase. The phase column is the
/// aggregate phase (see ModelState); per-sender automaton detail is not
/// serialized.
struct Trace {
  TraceSource source = TraceSource::Continuous;
  bool has_step_index = false;
  std::vector<ModelState> samples;
  std::vector<DropEvent> drops;
  std::vector<std::string> diagnostics;

  int n_senders() const {
    return samples.empty() ? 0 : samples.front().n_senders();
  }

  /// Checks the record invariants: strictly increasing sample times and all
  /// drop events inside the sampled span.
  void validate() const {
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (!(samples[i].t > samples[i - 1].t)) {
        throw std::logic_error("Trace: sample times not strictly increasing");
      }
    }
    if (!samples.empty()) {
      const double t0 = samples.front().t;
      const double t1 = samples.back().t;
      for (const auto& d : drops) {
        if (d.t < t0 || d.t > t1) {
          throw std::logic_error("Trace: drop event outside sampled span");
        }
      }
    }
  }
};

namespace detail {

/// Shortest round-trip decimal form; keeps replayed traces byte-identical.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline double parse_double(std::string_view f) {
  return std::strtod(std::string(f).c_str(), nullptr);
}

}  // namespace detail

inline void write_trace_csv(const Trace& trace, std::ostream& os) {
  std::string out;
  out += "# source=";
  out += to_string(trace.source);
  out += "\n# phase: 0=congestion_avoidance 1=drop_notification";
  out += " 2=recovery_no_send 3=recovery_transmit\n";
  out += "t";
  if (trace.has_step_index) out += ",k";
  const int n = trace.n_senders();
  for (int i = 1; i <= n; ++i) {
    out += ",W_";
    out += std::to_string(i);
  }
  out += ",q,x,phase\n";
  for (const auto& s : trace.samples) {
    detail::append_double(out, s.t);
    if (trace.has_step_index) {
      out += ',';
      out += std::to_string(s.step);
    }
    for (double w : s.windows) {
      out += ',';
      detail::append_double(out, w);
    }
    out += ',';
    detail::append_double(out, s.queue);
    out += ',';
    detail::append_double(out, s.avg_queue);
    out += ',';
    out += std::to_string(static_cast<int>(s.aggregate_phase()));
    out += '\n';
  }
  os << out;
}

inline void write_drops_csv(const Trace& trace, std::ostream& os) {
  std::string out;
  out += "# source=";
  out += to_string(trace.source);
  out += "\nt,sender\n";
  for (const auto& d : trace.drops) {
    detail::append_double(out, d.t);
    out += ',';
    out += std::to_string(d.sender + 1);  // 1-based, matching W_i columns
    out += '\n';
  }
  os << out;
}

/// Parses a trace written by write_trace_csv. Drop events live in a separate
/// file and are not restored here.
inline Trace read_trace_csv(std::istream& is) {
  Trace trace;
  std::string line;
  bool have_header = false;
  int n_windows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("source=");
      if (pos != std::string::npos) {
        std::string_view src = std::string_view(line).substr(pos + 7);
        if (src == "continuous") trace.source = TraceSource::Continuous;
        else if (src == "discrete") trace.source = TraceSource::Discrete;
        else if (src == "oracle") trace.source = TraceSource::Oracle;
      }
      continue;
    }
    auto fields = detail::split_csv(line);
    if (!have_header) {
      if (fields.empty() || fields[0] != "t") {
        throw std::runtime_error("trace csv: bad header");
      }
      trace.has_step_index = fields.size() > 1 && fields[1] == "k";
      for (const auto& f : fields) {
        if (f.substr(0, 2) == "W_") ++n_windows;
      }
      if (n_windows == 0) throw std::runtime_error("trace csv: no window columns");
      have_header = true;
      continue;
    }
    const std::size_t expect = 1 + (trace.has_step_index ? 1 : 0) + n_windows + 3;
    if (fields.size() != expect) {
      throw std::runtime_error("trace csv: wrong field count in row");
    }
    ModelState s;
    std::size_t i = 0;
    s.t = detail::parse_double(fields[i++]);
    if (trace.has_step_index) s.step = std::strtol(std::string(fields[i++]).c_str(), nullptr, 10);
    s.windows.resize(n_windows);
    for (int w = 0; w < n_windows; ++w) s.windows[w] = detail::parse_double(fields[i++]);
    s.queue = detail::parse_double(fields[i++]);
    s.avg_queue = detail::parse_double(fields[i++]);
    const int phase = static_cast<int>(std::strtol(std::string(fields[i]).c_str(), nullptr, 10));
    s.senders.assign(n_windows, SenderPhase{});
    if (phase != 0 && !s.senders.empty()) {
      s.senders[0].phase = static_cast<Phase>(phase);
      s.senders[0].timer = 1.0;  // detail lost in serialization; keep state valid
    }
    trace.samples.push_back(std::move(s));
  }
  if (!have_header) throw std::runtime_error("trace csv: empty file");
  return trace;
}

}  // namespace tcpred

#endif  // TCPRED_TRACE_HPP_
