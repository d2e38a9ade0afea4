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

#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicesim/agent.hpp"
#include "slicesim/env.hpp"
#include "slicesim/scenario.hpp"

namespace slicesim {

/// Deterministic CSV number formatting ("%.12g"); identical inputs always
/// serialize to identical bytes.
std::string format_csv_double(double value);

struct TrainingConfig {
  int max_steps = 20000;
  // Stop when the moving average of episode returns over `plateau_window`
  // episodes changes by less than `plateau_rel_change` relative to the
  // previous window. 0 disables the rule (budget-bound training).
  int plateau_window = 100;
  double plateau_rel_change = 0.01;

  void validate() const;
};

struct CurvePoint {
  int step = 0;
  double epsilon = 0.0;
  double loss = 0.0;            // latest training loss (0 before warmup)
  double episode_return = 0.0;  // return of the last completed episode
};

struct TrainOutput {
  QNetwork network;
  std::vector<CurvePoint> curve;  // one point per environment step
  std::vector<double> episode_returns;
  int steps_run = 0;
  bool plateau_reached = false;
};

/// Full DQN training run: epsilon-greedy rollouts, prioritized replay, soft
/// target updates, episode resets at the horizon. Deterministic under
/// (scenario, configs, seed). Throws on non-finite loss.
TrainOutput train_dqn(const Scenario& scenario, const EnvConfig& env_config,
                      const Hyperparams& hyper, const TrainingConfig& training,
                      std::uint64_t seed);

struct TrainingResult {
  std::filesystem::path checkpoint_path;
  std::filesystem::path curve_path;
  int steps_run = 0;
  double final_epsilon = 0.0;
  double mean_return_last_window = 0.0;
};

/// train_dqn plus artifacts: `<tag>_qnet.txt` checkpoint and
/// `<tag>_curve.csv` (step, epsilon, loss, episode_return) under out_dir.
TrainingResult run_training(const Scenario& scenario, const EnvConfig& env_config,
                            const Hyperparams& hyper, const TrainingConfig& training,
                            std::uint64_t seed,
                            const std::filesystem::path& out_dir,
                            const std::string& tag = "dqn");

/// Episode-level aggregates of one evaluation rollout.
struct MetricsRecord {
  std::vector<double> user_throughput_bps;  // episode average per user
  std::vector<double> user_latency_s;
  std::vector<Slice> user_slice;
  std::array<double, kSliceCount> jfi_per_slice = {0.0, 0.0, 0.0};
  std::array<double, kSliceCount> sla_per_slice = {0.0, 0.0, 0.0};
  double sla_overall = 0.0;
  double cache_hit_ratio = 0.0;
  double episode_return = 0.0;

  double mean_throughput_bps() const;
  double mean_latency_s() const;
  double median_throughput_bps() const;
  double median_latency_s() const;
};

struct EvalOptions {
  int episodes = 1;
  // Per-step trace: interval, action, reward parts, per-slice utility means.
  std::optional<std::filesystem::path> step_trace;
  // Per-user rows per interval; the raw data MetricsRecord aggregates.
  std::optional<std::filesystem::path> user_trace;
  // Cache trace: interval, bs, hits, misses, occupancy_bits.
  std::optional<std::filesystem::path> cache_trace;
};

/// Frozen-policy rollout(s) on a fresh world seeded with `seed`.
MetricsRecord evaluate_policy(const Scenario& scenario, const EnvConfig& env_config,
                              Policy& policy, std::uint64_t seed,
                              const EvalOptions& options = {});

enum class SweepMode { kKappa, kServers, kAblation };

std::string_view sweep_mode_name(SweepMode mode);
std::optional<SweepMode> sweep_mode_from_name(std::string_view name);

/// One ladder row of the component-contribution study.
struct AblationRow {
  std::string_view name;
  bool caching = false;
  bool prewarm = false;
  PolicyKind policy = PolicyKind::kStaticEqual;
  UtilityShaping shaping = UtilityShaping::kUniformBalanced;
};

/// baseline -> +caching -> +DQN -> +latency shaping -> +throughput shaping
/// -> full model.
std::span<const AblationRow> ablation_rows();

struct SweepSpec {
  SweepMode mode = SweepMode::kKappa;
  std::vector<double> values;  // kappa values or server counts; unused for ablation
  std::vector<std::uint64_t> seeds;
  PolicyKind policy = PolicyKind::kDqn;
  std::optional<std::filesystem::path> checkpoint;  // reuse instead of training
  int jobs = 1;
  std::uint64_t train_seed = 1;

  void validate() const;
};

/// Runs every (value, seed) point with a frozen policy and writes
/// metrics.csv, summary.csv (seed-averaged), and per-user sample files for
/// CDF plots. DQN sweeps without a checkpoint train once per swept value
/// (kappa, ablation) or once overall (servers). Points run in parallel with
/// `jobs` workers; outputs are sorted by key, so results are byte-identical
/// regardless of scheduling.
void run_sweep(const Scenario& scenario, const EnvConfig& env_config,
               const Hyperparams& hyper, const TrainingConfig& training,
               const SweepSpec& spec, const std::filesystem::path& out_dir);

/// Sorted empirical CDF: rows (value, (i+1)/n), last fraction exactly 1.
/// Throws std::invalid_argument on empty input.
void export_cdf(std::vector<double> samples, std::ostream& out);

/// Reads one numeric column from a one-line-header CSV file.
std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    const std::string& column);

/// Experiment knobs shared by the CLI commands: environment, agent, and
/// training-budget sections of the hyperparameter file.
struct ExperimentConfig {
  EnvConfig env;
  Hyperparams dqn;
  TrainingConfig training;
};

/// Strict JSON parsing (unknown key = error, defaults for omitted keys),
/// mirroring the scenario loader. Throws ConfigError naming the bad key.
ExperimentConfig load_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config_file(const std::filesystem::path& path);

std::string_view utility_shaping_name(UtilityShaping shaping);
std::optional<UtilityShaping> utility_shaping_from_name(std::string_view name);

}  // namespace slicesim
