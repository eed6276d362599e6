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

// tcpred: simulation lab for congested TCP/RED bottleneck dynamics.
//
//   simulate  continuous- or discrete-time model run -> trace CSV
//   oracle    packet-level event simulation -> trace CSV
//   compare   statistics/period/histogram-distance report for two traces
//   estimate  particle-filter state estimation against a truth trace
//   scenario  named presets (one-sender, two-senders, four-senders,
//             two-classes) on any of the three simulators
//   replay    re-run a recorded manifest
//
// Every run writes <out>-manifest.json capturing the fully resolved
// configuration and seed; replaying a manifest reproduces the trace byte for
// byte on the same build.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcpred/analysis.hpp"
#include "tcpred/config_json.hpp"
#include "tcpred/continuous.hpp"
#include "tcpred/discrete.hpp"
#include "tcpred/filter.hpp"
#include "tcpred/oracle.hpp"
#include "tcpred/scenario.hpp"
#include "tcpred/trace.hpp"
#include "tcpred/version.hpp"

namespace {

using namespace tcpred;

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind(".csv");
  return dot == std::string::npos ? path : path.substr(0, dot);
}

void write_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_trace_csv(trace, out);
}

Trace read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace_csv(in);
}

Trace execute(const RunSpec& spec) {
  if (spec.command == "simulate") {
    DropProcess process(spec.drop_mode, spec.seed);
    const ModelState init = initial_state(spec.net);
    if (spec.model == "continuous") {
      continuous::IntegratorConfig icfg;
      icfg.step_size = spec.step_size > 0.0 ? spec.step_size
                                            : spec.net.packet_interval() / 4.0;
      icfg.saturated = spec.saturated;
      icfg.emulate_no_send = spec.emulate_no_send;
      icfg.sample_stride = spec.sample_stride;
      return continuous::simulate(spec.net, spec.red, icfg, process,
                                  spec.t_end, init);
    }
    if (spec.model == "discrete") {
      return discrete::simulate(spec.net, spec.red, process, spec.t_end, init,
                                spec.sample_stride);
    }
    throw std::invalid_argument("unknown model: " + spec.model);
  }
  if (spec.command == "oracle") {
    oracle::OracleConfig ocfg;
    ocfg.buffer_limit = spec.buffer_limit;
    ocfg.sample_interval = spec.sample_interval;
    ocfg.drop_mode =
        spec.drop_mode == DropMode::None ? DropMode::None : DropMode::FullRed;
    return oracle::run(spec.net, spec.red, spec.t_end, spec.seed, ocfg);
  }
  throw std::invalid_argument("cannot execute command: " + spec.command);
}

void emit_run(const RunSpec& spec, const Trace& trace, const std::string& out) {
  const std::string stem = stem_of(out);
  write_file(out, trace);
  {
    std::ofstream drops(stem + "-drops.csv", std::ios::binary);
    if (!drops) throw std::runtime_error("cannot write drops csv");
    write_drops_csv(trace, drops);
  }
  write_json_file(stem + "-manifest.json", manifest_json(spec));
  for (const auto& d : trace.diagnostics) {
    std::cerr << "note: " << d << "\n";
  }
  std::cerr << "wrote " << out << " (" << trace.samples.size() << " samples, "
            << trace.drops.size() << " drops)\n";
}

nlohmann::json trace_report(const Trace& trace, double t_start, double t_end) {
  nlohmann::json j;
  const auto stats = analysis::queue_stats(trace, t_start, t_end);
  j["queue_mean"] = stats.mean;
  j["queue_stdev"] = stats.stdev;
  j["samples"] = stats.count;
  try {
    j["period"] = analysis::oscillation_period(trace, t_start, t_end);
  } catch (const std::domain_error&) {
    j["period"] = nullptr;
  }
  const auto hist = analysis::queue_histogram(trace, 1.0, t_start, t_end);
  const auto support = analysis::histogram_support(hist);
  j["queue_support"] = {support.first, support.second};
  return j;
}

// Assimilates one windows observation per cadence interval and emits an
// estimate-vs-truth series.
void run_estimate(const RunSpec& spec, const std::string& out) {
  const Trace truth = read_file(spec.truth_path);
  if (truth.samples.empty()) throw std::runtime_error("empty truth trace");
  const int n = truth.n_senders();
  if (spec.net.n_senders() != n) {
    throw std::invalid_argument(
        "estimate: config sender count does not match the truth trace");
  }
  for (int idx : spec.observe_windows) {
    if (idx < 0 || idx >= n) {
      throw std::invalid_argument("estimate: observed window out of range");
    }
  }
  const double model_dt = spec.net.n_senders() * spec.net.packet_interval();
  const long cadence =
      std::max<long>(1, std::lround(spec.observe_every / model_dt));
  auto ens =
      filter::init_ensemble(spec.particles, spec.prior, spec.net, spec.seed);
  Rng resample_rng(spec.seed, 0xfeed);
  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << "t,q_true,q_est,q_std";
  for (int idx : spec.observe_windows) {
    os << ",W_" << idx + 1 << "_true,W_" << idx + 1 << "_est";
  }
  os << ",neff\n";
  const double t0 = truth.samples.front().t;
  std::size_t cursor = 0;
  long steps_done = 0;
  while (true) {
    const double target_t =
        t0 + static_cast<double>(steps_done + cadence) * model_dt;
    if (target_t > truth.samples.back().t) break;
    while (cursor + 1 < truth.samples.size() &&
           truth.samples[cursor + 1].t <= target_t) {
      ++cursor;
    }
    filter::advance(ens, spec.net, spec.red, cadence);
    steps_done += cadence;
    const ModelState& obs_sample = truth.samples[cursor];
    filter::Observation obs;
    obs.time = obs_sample.t;
    obs.window_noise_std = spec.obs_noise_std;
    for (int idx : spec.observe_windows) {
      obs.windows.push_back({idx, obs_sample.windows[idx]});
    }
    filter::assimilate(ens, obs, spec.net, resample_rng);
    const auto est = filter::estimate(ens);
    os << obs_sample.t << ',' << obs_sample.queue << ',' << est.queue_mean
       << ',' << est.queue_std;
    for (int idx : spec.observe_windows) {
      os << ',' << obs_sample.windows[idx] << ',' << est.window_mean[idx];
    }
    os << ',' << ens.effective_sample_size() << "\n";
  }
  write_json_file(stem_of(out) + "-manifest.json", manifest_json(spec));
  std::cerr << "wrote " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TCP/RED bottleneck dynamics lab"};
  app.set_version_flag("--version", std::string("tcpred ") + kVersion);
  app.require_subcommand(1);

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "run one of the two models");
  std::string sim_config, sim_out = "trace.csv";
  std::string sim_model = "continuous";
  std::string sim_drop = "deterministic";
  double sim_t_end = 100.0, sim_h = 0.0;
  std::uint64_t sim_seed = 1;
  bool sim_unsaturated = false, sim_no_send = false;
  int sim_stride = 1;
  sim->add_option("--model", sim_model, "continuous|discrete")
      ->check(CLI::IsMember({"continuous", "discrete"}));
  sim->add_option("--drop-mode", sim_drop,
                  "none|deterministic|interdrop|full-red");
  sim->add_option("--config", sim_config, "JSON config file");
  sim->add_option("--t-end", sim_t_end, "end time, seconds");
  sim->add_option("--seed", sim_seed, "random seed (full-red only)");
  sim->add_option("--h", sim_h, "integrator step, seconds (continuous)");
  sim->add_flag("--unsaturated", sim_unsaturated,
                "use the empty-queue-aware equations (continuous)");
  sim->add_flag("--emulate-no-send", sim_no_send,
                "drain-only no-send span after window cuts (continuous)");
  sim->add_option("--sample-stride", sim_stride, "record every k-th step");
  sim->add_option("--out", sim_out, "trace CSV path");

  // ---- oracle ----
  auto* orc = app.add_subcommand("oracle", "packet-level event simulation");
  std::string orc_config, orc_out = "trace.csv";
  double orc_t_end = 100.0, orc_buffer = 0.0, orc_sample = 0.0;
  std::uint64_t orc_seed = 1;
  bool orc_no_red = false;
  orc->add_option("--config", orc_config, "JSON config file");
  orc->add_option("--t-end", orc_t_end, "end time, seconds");
  orc->add_option("--seed", orc_seed, "random seed");
  orc->add_option("--buffer-limit", orc_buffer, "router buffer, packets");
  orc->add_option("--sample-interval", orc_sample, "trace sampling, seconds");
  orc->add_flag("--no-red", orc_no_red, "disable early dropping");
  orc->add_option("--out", orc_out, "trace CSV path");

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "compare two traces");
  std::string cmp_a, cmp_b, cmp_out;
  double cmp_t0 = 0.0, cmp_t1 = 1e30, cmp_bin = 1.0;
  cmp->add_option("--a", cmp_a, "first trace CSV")->required();
  cmp->add_option("--b", cmp_b, "second trace CSV")->required();
  cmp->add_option("--t-start", cmp_t0, "window start");
  cmp->add_option("--t-end", cmp_t1, "window end");
  cmp->add_option("--bin-width", cmp_bin, "histogram bin width, packets");
  cmp->add_option("--out", cmp_out, "report JSON path (default stdout)");

  // ---- estimate ----
  auto* est = app.add_subcommand("estimate", "particle-filter estimation");
  std::string est_truth, est_config, est_out = "estimate.csv";
  std::vector<std::string> est_observe{"W1"};
  double est_every = 0.5, est_noise = 1.0;
  int est_particles = 1000;
  std::uint64_t est_seed = 1;
  est->add_option("--truth", est_truth, "truth trace CSV")->required();
  est->add_option("--observe", est_observe,
                  "observed channels, e.g. W1 W2 (1-based senders)");
  est->add_option("--every", est_every, "observation cadence, seconds");
  est->add_option("--particles", est_particles, "ensemble size");
  est->add_option("--seed", est_seed, "random seed");
  est->add_option("--noise-std", est_noise, "observation noise, packets");
  est->add_option("--config", est_config, "JSON config file");
  est->add_option("--out", est_out, "estimate CSV path");

  // ---- scenario ----
  auto* scn = app.add_subcommand("scenario", "run a named preset");
  std::string scn_name, scn_drop, scn_out = "trace.csv";
  std::string scn_model = "discrete";
  std::uint64_t scn_seed = 1;
  double scn_t_end = -1.0;
  scn->add_option("name", scn_name,
                  "one-sender|two-senders|four-senders|two-classes")
      ->required();
  scn->add_option("--model", scn_model, "continuous|discrete|oracle")
      ->check(CLI::IsMember({"continuous", "discrete", "oracle"}));
  scn->add_option("--drop-mode", scn_drop, "override the preset drop mode");
  scn->add_option("--seed", scn_seed, "random seed");
  scn->add_option("--t-end", scn_t_end, "override preset duration");
  scn->add_option("--out", scn_out, "trace CSV path");

  // ---- replay ----
  auto* rep = app.add_subcommand("replay", "re-run a recorded manifest");
  std::string rep_manifest, rep_out = "replay.csv";
  rep->add_option("--manifest", rep_manifest, "manifest JSON")->required();
  rep->add_option("--out", rep_out, "trace CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      RunSpec spec;
      if (!sim_config.empty()) spec = runspec_from_json(read_json_file(sim_config));
      spec.command = "simulate";
      if (sim->count("--model") || spec.model.empty()) spec.model = sim_model;
      if (sim->count("--drop-mode") || sim_config.empty()) {
        spec.drop_mode = drop_mode_from_string(sim_drop);
      }
      if (sim->count("--t-end") || sim_config.empty()) spec.t_end = sim_t_end;
      if (sim->count("--seed")) spec.seed = sim_seed;
      if (sim->count("--h")) spec.step_size = sim_h;
      if (sim_unsaturated) spec.saturated = false;
      if (sim_no_send) spec.emulate_no_send = true;
      if (sim->count("--sample-stride")) spec.sample_stride = sim_stride;
      emit_run(spec, execute(spec), sim_out);
      return 0;
    }
    if (orc->parsed()) {
      RunSpec spec;
      if (!orc_config.empty()) spec = runspec_from_json(read_json_file(orc_config));
      spec.command = "oracle";
      spec.drop_mode = orc_no_red ? DropMode::None : DropMode::FullRed;
      if (orc->count("--t-end") || orc_config.empty()) spec.t_end = orc_t_end;
      if (orc->count("--seed")) spec.seed = orc_seed;
      if (orc->count("--buffer-limit")) spec.buffer_limit = orc_buffer;
      if (orc->count("--sample-interval")) spec.sample_interval = orc_sample;
      emit_run(spec, execute(spec), orc_out);
      return 0;
    }
    if (cmp->parsed()) {
      const Trace a = read_file(cmp_a);
      const Trace b = read_file(cmp_b);
      nlohmann::json j;
      j["a"] = trace_report(a, cmp_t0, cmp_t1);
      j["b"] = trace_report(b, cmp_t0, cmp_t1);
      j["l1_histogram_distance"] = analysis::histogram_l1(
          analysis::queue_histogram(a, cmp_bin, cmp_t0, cmp_t1),
          analysis::queue_histogram(b, cmp_bin, cmp_t0, cmp_t1));
      if (cmp_out.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        write_json_file(cmp_out, j);
      }
      return 0;
    }
    if (est->parsed()) {
      RunSpec spec;
      if (!est_config.empty()) {
        spec = runspec_from_json(read_json_file(est_config));
      } else {
        const Trace truth = read_file(est_truth);
        spec.net.senders.assign(std::max(truth.n_senders(), 1),
                                SenderConfig{});
      }
      spec.command = "estimate";
      spec.truth_path = est_truth;
      spec.observe_windows.clear();
      for (const auto& ch : est_observe) {
        if (ch.size() < 2 || (ch[0] != 'W' && ch[0] != 'w')) {
          throw std::invalid_argument("estimate: channel must look like W1");
        }
        spec.observe_windows.push_back(std::stoi(ch.substr(1)) - 1);
      }
      spec.observe_every = est_every;
      spec.particles = est_particles;
      spec.seed = est_seed;
      spec.obs_noise_std = est_noise;
      run_estimate(spec, est_out);
      return 0;
    }
    if (scn->parsed()) {
      const Scenario preset = make_scenario(scn_name);
      RunSpec spec;
      spec.net = preset.net;
      spec.red = preset.red;
      spec.drop_mode = preset.drop_mode;
      spec.t_end = scn_t_end >= 0.0 ? scn_t_end : preset.t_end;
      spec.seed = scn_seed;
      if (!scn_drop.empty()) spec.drop_mode = drop_mode_from_string(scn_drop);
      if (scn_model == "oracle") {
        spec.command = "oracle";
      } else {
        spec.command = "simulate";
        spec.model = scn_model;
        if (scn_model == "continuous") {
          // per-packet step keeps the stochastic drop counting aligned
          spec.step_size = preset.net.packet_interval();
        }
      }
      const Trace trace = execute(spec);
      emit_run(spec, trace, scn_out);
      const double t0 = std::min(20.0, 0.2 * spec.t_end);
      nlohmann::json report = trace_report(trace, t0, spec.t_end);
      report["scenario"] = scn_name;
      write_json_file(stem_of(scn_out) + "-report.json", report);
      std::cout << report.dump(2) << "\n";
      return 0;
    }
    if (rep->parsed()) {
      const RunSpec spec = runspec_from_json(read_json_file(rep_manifest));
      if (spec.command == "estimate") {
        run_estimate(spec, rep_out);
      } else {
        emit_run(spec, execute(spec), rep_out);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
