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
#ifndef TCPRED_CONFIG_JSON_HPP_
#define TCPRED_CONFIG_JSON_HPP_

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcpred/config.hpp"
#include "tcpred/drop.hpp"
#include "tcpred/filter.hpp"
#include "tcpred/version.hpp"

namespace tcpred {

// Structured-text configuration and run manifests. Field names follow the
// conventional symbols (a, q_min, ...) so config files read like the usual
// parameter tables.

inline nlohmann::json to_json(const RedParams& red) {
  return nlohmann::json{{"q_min", red.min_thresh},
                        {"q_max", red.max_thresh},
                        {"p_max", red.max_prob},
                        {"w", red.weight},
                        {"wait_mode", red.wait_mode}};
}

inline RedParams red_from_json(const nlohmann::json& j) {
  RedParams red;
  red.min_thresh = j.value("q_min", red.min_thresh);
  red.max_thresh = j.value("q_max", red.max_thresh);
  red.max_prob = j.value("p_max", red.max_prob);
  red.weight = j.value("w", red.weight);
  red.wait_mode = j.value("wait_mode", red.wait_mode);
  red.validate();
  return red;
}

inline nlohmann::json to_json(const NetworkConfig& net) {
  nlohmann::json senders = nlohmann::json::array();
  for (const auto& s : net.senders) {
    nlohmann::json on = nlohmann::json::array();
    for (const auto& iv : s.active) on.push_back({iv.on, iv.off});
    senders.push_back({{"a", s.delay}, {"on", on}});
  }
  return nlohmann::json{{"network",
                         {{"link_bandwidth", net.link_bandwidth_bps},
                          {"packet_size", net.packet_size_bytes}}},
                        {"senders", senders}};
}

inline NetworkConfig net_from_json(const nlohmann::json& root) {
  NetworkConfig net;
  if (root.contains("network")) {
    const auto& j = root.at("network");
    net.link_bandwidth_bps = j.value("link_bandwidth", net.link_bandwidth_bps);
    net.packet_size_bytes = j.value("packet_size", net.packet_size_bytes);
  }
  if (root.contains("senders")) {
    net.senders.clear();
    for (const auto& js : root.at("senders")) {
      SenderConfig s;
      s.delay = js.value("a", 0.01);
      if (js.contains("on")) {
        s.active.clear();
        for (const auto& iv : js.at("on")) {
          s.active.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
        }
      }
      net.senders.push_back(std::move(s));
    }
  }
  net.validate();
  return net;
}

/// Fully resolved description of one run; written as the manifest next to
/// every trace and sufficient to reproduce it on the same build.
struct RunSpec {
  std::string command = "simulate";  // simulate | oracle | estimate
  std::string model = "continuous";  // for simulate
  DropMode drop_mode = DropMode::Deterministic;
  std::uint64_t seed = 1;
  double t_end = 100.0;
  // continuous-model integrator settings
  double step_size = 0.0;  // 0 selects delta/4
  bool saturated = true;
  bool emulate_no_send = false;
  int sample_stride = 1;
  // oracle settings
  double buffer_limit = 0.0;     // 0 selects 2*q_max
  double sample_interval = 0.0;  // 0 selects delta
  // estimation settings
  std::string truth_path;
  std::vector<int> observe_windows;  // 0-based sender indices
  double observe_every = 0.5;
  int particles = 1000;
  double obs_noise_std = 1.0;
  filter::PriorSpec prior;

  NetworkConfig net;
  RedParams red;
};

inline nlohmann::json to_json(const RunSpec& spec) {
  nlohmann::json j = to_json(spec.net);
  j["red"] = to_json(spec.red);
  j["run"] = {
      {"command", spec.command},
      {"model", spec.model},
      {"drop_mode", to_string(spec.drop_mode)},
      {"seed", spec.seed},
      {"t_end", spec.t_end},
      {"h", spec.step_size},
      {"saturated", spec.saturated},
      {"emulate_no_send", spec.emulate_no_send},
      {"sample_stride", spec.sample_stride},
      {"buffer_limit", spec.buffer_limit},
      {"sample_interval", spec.sample_interval},
  };
  if (spec.command == "estimate") {
    j["run"]["truth"] = spec.truth_path;
    j["run"]["observe_windows"] = spec.observe_windows;
    j["run"]["every"] = spec.observe_every;
    j["run"]["particles"] = spec.particles;
    j["run"]["obs_noise_std"] = spec.obs_noise_std;
    j["run"]["prior"] = {{"window", spec.prior.window_range},
                         {"queue", spec.prior.queue_range},
                         {"avg_queue", spec.prior.avg_queue_range}};
  }
  return j;
}

inline RunSpec runspec_from_json(const nlohmann::json& root) {
  RunSpec spec;
  spec.net = net_from_json(root);
  if (root.contains("red")) spec.red = red_from_json(root.at("red"));
  if (root.contains("run")) {
    const auto& j = root.at("run");
    spec.command = j.value("command", spec.command);
    spec.model = j.value("model", spec.model);
    spec.drop_mode =
        drop_mode_from_string(j.value("drop_mode", to_string(spec.drop_mode)));
    spec.seed = j.value("seed", spec.seed);
    spec.t_end = j.value("t_end", spec.t_end);
    spec.step_size = j.value("h", spec.step_size);
    spec.saturated = j.value("saturated", spec.saturated);
    spec.emulate_no_send = j.value("emulate_no_send", spec.emulate_no_send);
    spec.sample_stride = j.value("sample_stride", spec.sample_stride);
    spec.buffer_limit = j.value("buffer_limit", spec.buffer_limit);
    spec.sample_interval = j.value("sample_interval", spec.sample_interval);
    spec.truth_path = j.value("truth", spec.truth_path);
    if (j.contains("observe_windows")) {
      spec.observe_windows = j.at("observe_windows").get<std::vector<int>>();
    }
    spec.observe_every = j.value("every", spec.observe_every);
    spec.particles = j.value("particles", spec.particles);
    spec.obs_noise_std = j.value("obs_noise_std", spec.obs_noise_std);
    if (j.contains("prior")) {
      const auto& p = j.at("prior");
      if (p.contains("window")) {
        spec.prior.window_range = p.at("window").get<std::array<double, 2>>();
      }
      if (p.contains("queue")) {
        spec.prior.queue_range = p.at("queue").get<std::array<double, 2>>();
      }
      if (p.contains("avg_queue")) {
        spec.prior.avg_queue_range =
            p.at("avg_queue").get<std::array<double, 2>>();
      }
    }
  }
  return spec;
}

inline nlohmann::json manifest_json(const RunSpec& spec) {
  nlohmann::json j = to_json(spec);
  j["tool"] = "tcpred";
  j["version"] = kVersion;
  return j;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace tcpred

#endif  // TCPRED_CONFIG_JSON_HPP_
