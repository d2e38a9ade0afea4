// Copyright 2026 The slicesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner: train a DQN controller, evaluate policies, run the
// kappa / edge-server / ablation sweeps, and turn sample files into CDFs.
// All outputs are CSV with a one-line header.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slicesim/harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace slicesim;

ExperimentConfig load_experiment(const std::string& hyper_path) {
  if (hyper_path.empty()) return ExperimentConfig{};
  return load_experiment_config_file(hyper_path);
}

int run_train(const std::string& scenario_path, const std::string& hyper_path,
              std::uint64_t seed, const std::string& out_dir,
              const std::string& tag) {
  Scenario scenario = load_scenario_file(scenario_path);
  ExperimentConfig experiment = load_experiment(hyper_path);
  TrainingResult result = run_training(scenario, experiment.env, experiment.dqn,
                                       experiment.training, seed, out_dir, tag);
  std::cout << "checkpoint: " << result.checkpoint_path.string() << '\n'
            << "curve: " << result.curve_path.string() << '\n'
            << "steps: " << result.steps_run << '\n'
            << "final_epsilon: " << format_csv_double(result.final_epsilon) << '\n'
            << "mean_return_last_window: "
            << format_csv_double(result.mean_return_last_window) << '\n';
  return 0;
}

int run_eval(const std::string& scenario_path, const std::string& hyper_path,
             const std::string& policy_name, const std::string& checkpoint,
             const std::vector<std::uint64_t>& seeds, int episodes,
             const std::string& out_dir, bool step_trace, bool user_trace,
             bool cache_trace) {
  Scenario scenario = load_scenario_file(scenario_path);
  ExperimentConfig experiment = load_experiment(hyper_path);
  auto kind = policy_kind_from_name(policy_name);
  if (!kind) throw std::invalid_argument("unknown policy: " + policy_name);
  if (*kind == PolicyKind::kDqn && checkpoint.empty()) {
    throw std::invalid_argument("policy dqn requires --checkpoint");
  }
  if (*kind == PolicyKind::kNoCache) experiment.env.caching_enabled = false;

  fs::create_directories(out_dir);
  std::ofstream metrics(fs::path(out_dir) / "metrics.csv", std::ios::binary);
  metrics << "policy,seed,median_throughput_bps,mean_throughput_bps,"
             "median_latency_s,mean_latency_s,jfi_embb,jfi_urllc,jfi_mbrllc,"
             "sla_embb,sla_urllc,sla_mbrllc,sla_overall,cache_hit_ratio,"
             "episode_return\n";

  for (std::uint64_t seed : seeds) {
    std::unique_ptr<Policy> policy;
    if (*kind == PolicyKind::kDqn) {
      policy = std::make_unique<DqnPolicy>(QNetwork::load_file(checkpoint));
    } else {
      policy = make_baseline(*kind);
    }
    EvalOptions options;
    options.episodes = episodes;
    std::string suffix = std::to_string(seed) + ".csv";
    if (step_trace) options.step_trace = fs::path(out_dir) / ("step_trace_" + suffix);
    if (user_trace) options.user_trace = fs::path(out_dir) / ("user_trace_" + suffix);
    if (cache_trace) {
      options.cache_trace = fs::path(out_dir) / ("cache_trace_" + suffix);
    }
    MetricsRecord r =
        evaluate_policy(scenario, experiment.env, *policy, seed, options);
    metrics << policy_name << ',' << seed << ','
            << format_csv_double(r.median_throughput_bps()) << ','
            << format_csv_double(r.mean_throughput_bps()) << ','
            << format_csv_double(r.median_latency_s()) << ','
            << format_csv_double(r.mean_latency_s()) << ','
            << format_csv_double(r.jfi_per_slice[0]) << ','
            << format_csv_double(r.jfi_per_slice[1]) << ','
            << format_csv_double(r.jfi_per_slice[2]) << ','
            << format_csv_double(r.sla_per_slice[0]) << ','
            << format_csv_double(r.sla_per_slice[1]) << ','
            << format_csv_double(r.sla_per_slice[2]) << ','
            << format_csv_double(r.sla_overall) << ','
            << format_csv_double(r.cache_hit_ratio) << ','
            << format_csv_double(r.episode_return) << '\n';
  }
  std::cout << "metrics: " << (fs::path(out_dir) / "metrics.csv").string() << '\n';
  return 0;
}

int run_sweep_cmd(const std::string& scenario_path, const std::string& hyper_path,
                  const std::string& mode_name, std::vector<double> values,
                  const std::vector<std::uint64_t>& seeds,
                  const std::string& policy_name, const std::string& checkpoint,
                  int jobs, std::uint64_t train_seed, const std::string& out_dir) {
  Scenario scenario = load_scenario_file(scenario_path);
  ExperimentConfig experiment = load_experiment(hyper_path);
  auto mode = sweep_mode_from_name(mode_name);
  if (!mode) throw std::invalid_argument("unknown sweep mode: " + mode_name);
  auto kind = policy_kind_from_name(policy_name);
  if (!kind) throw std::invalid_argument("unknown policy: " + policy_name);

  if (values.empty()) {
    if (*mode == SweepMode::kKappa) values = {0.1, 0.4, 0.7, 1.0};
    if (*mode == SweepMode::kServers) values = {1, 3, 5, 7};
  }

  SweepSpec spec;
  spec.mode = *mode;
  spec.values = std::move(values);
  spec.seeds = seeds;
  spec.policy = *kind;
  if (!checkpoint.empty()) spec.checkpoint = checkpoint;
  spec.jobs = jobs;
  spec.train_seed = train_seed;
  run_sweep(scenario, experiment.env, experiment.dqn, experiment.training, spec,
            out_dir);
  std::cout << "sweep outputs in " << out_dir << '\n';
  return 0;
}

int run_cdf(const std::string& input, const std::string& column,
            const std::string& output) {
  std::vector<double> samples = read_csv_column(input, column);
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + output);
  export_cdf(std::move(samples), out);
  std::cout << "cdf: " << output << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-slice RAN simulator with edge caching and DQN control"};
  app.require_subcommand(1);

  std::string scenario_path, hyper_path, out_dir, tag = "dqn";
  std::string policy_name = "dqn", checkpoint, mode_name, input, column, output;
  std::uint64_t seed = 1, train_seed = 1;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<double> values;
  int episodes = 1, jobs = 1;
  bool step_trace = false, user_trace = false, cache_trace = false;

  CLI::App* train = app.add_subcommand("train", "train the DQN controller");
  train->add_option("--scenario", scenario_path, "scenario config file")->required();
  train->add_option("--hyper", hyper_path, "experiment config file");
  train->add_option("--seed", seed, "training seed");
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--tag", tag, "artifact name prefix");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a frozen policy");
  eval->add_option("--scenario", scenario_path, "scenario config file")->required();
  eval->add_option("--hyper", hyper_path, "experiment config file");
  eval->add_option("--policy", policy_name,
                   "dqn|static-equal|fairness-driven|greedy-one-step|random|no-cache");
  eval->add_option("--checkpoint", checkpoint, "checkpoint for --policy dqn");
  eval->add_option("--seeds", seeds, "evaluation seeds")->delimiter(',');
  eval->add_option("--episodes", episodes, "episodes per seed");
  eval->add_option("--out", out_dir, "output directory")->required();
  eval->add_flag("--step-trace", step_trace, "write per-step trace CSVs");
  eval->add_flag("--user-trace", user_trace, "write per-user trace CSVs");
  eval->add_flag("--cache-trace", cache_trace, "write cache trace CSVs");

  CLI::App* sweep = app.add_subcommand("sweep", "kappa / servers / ablation sweeps");
  sweep->add_option("--mode", mode_name, "kappa|servers|ablation")->required();
  sweep->add_option("--scenario", scenario_path, "scenario config file")->required();
  sweep->add_option("--hyper", hyper_path, "experiment config file");
  sweep->add_option("--values", values, "swept values")->delimiter(',');
  sweep->add_option("--seeds", seeds, "evaluation seeds")->delimiter(',');
  sweep->add_option("--policy", policy_name, "policy under test");
  sweep->add_option("--checkpoint", checkpoint, "frozen checkpoint to reuse");
  sweep->add_option("--jobs", jobs, "parallel workers");
  sweep->add_option("--train-seed", train_seed, "seed for in-sweep training");
  sweep->add_option("--out", out_dir, "output directory")->required();

  CLI::App* cdf = app.add_subcommand("cdf", "sorted empirical CDF of a CSV column");
  cdf->add_option("--input", input, "samples CSV")->required();
  cdf->add_option("--column", column, "column name")->required();
  cdf->add_option("--out", output, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return run_train(scenario_path, hyper_path, seed, out_dir, tag);
    }
    if (eval->parsed()) {
      return run_eval(scenario_path, hyper_path, policy_name, checkpoint, seeds,
                      episodes, out_dir, step_trace, user_trace, cache_trace);
    }
    if (sweep->parsed()) {
      return run_sweep_cmd(scenario_path, hyper_path, mode_name, values, seeds,
                           policy_name, checkpoint, jobs, train_seed, out_dir);
    }
    if (cdf->parsed()) {
      return run_cdf(input, column, output);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
