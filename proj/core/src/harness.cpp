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

#include "slicesim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace slicesim {

namespace {

using nlohmann::json;

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

/// Runs fn(0..n-1) on `jobs` workers; rethrows the first task exception.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string format_csv_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void TrainingConfig::validate() const {
  if (max_steps < 1) throw std::invalid_argument("TrainingConfig: max_steps must be >= 1");
  if (plateau_window < 0) {
    throw std::invalid_argument("TrainingConfig: plateau_window must be >= 0");
  }
  if (plateau_rel_change < 0.0) {
    throw std::invalid_argument("TrainingConfig: plateau_rel_change must be >= 0");
  }
}

TrainOutput train_dqn(const Scenario& scenario, const EnvConfig& env_config,
                      const Hyperparams& hyper, const TrainingConfig& training,
                      std::uint64_t seed) {
  hyper.validate();
  training.validate();
  World world(scenario, env_config, seed);
  Rng agent_rng(substream_seed(seed, "agent"));

  std::vector<int> dims;
  dims.push_back(world.observation_dim());
  dims.insert(dims.end(), hyper.hidden.begin(), hyper.hidden.end());
  dims.push_back(world.action_count());

  TrainOutput out{QNetwork(dims, agent_rng), {}, {}, 0, false};
  QNetwork target = out.network;
  MomentOptimizer optimizer(out.network.param_count(), hyper.learning_rate);
  ReplayBuffer buffer(hyper.buffer_capacity, hyper.alpha_prio);

  Observation obs = world.observe();
  double episode_return = 0.0;
  double last_episode_return = 0.0;
  double last_loss = 0.0;
  out.curve.reserve(training.max_steps);

  for (int step = 0; step < training.max_steps; ++step) {
    double eps = hyper.epsilon_at(step);
    std::vector<double> q = out.network.forward(obs);
    int action = select_action(q, eps, agent_rng);
    StepResult result = world.step(action);
    buffer.push({obs, action, result.reward.total, result.observation, result.done});

    if (buffer.size() >= static_cast<std::size_t>(hyper.train_start) &&
        step % hyper.train_every == 0) {
      double beta = hyper.beta_at(step, training.max_steps);
      last_loss = train_step(buffer, out.network, target, optimizer, hyper, beta,
                             agent_rng);
      if (!std::isfinite(last_loss)) {
        throw std::runtime_error("train_dqn: non-finite loss at step " +
                                 std::to_string(step));
      }
      soft_update(target, out.network, hyper.tau);
    }

    episode_return += result.reward.total;
    out.curve.push_back({step, eps, last_loss, last_episode_return});
    out.steps_run = step + 1;

    if (result.done) {
      out.episode_returns.push_back(episode_return);
      last_episode_return = episode_return;
      episode_return = 0.0;
      world.reset();
      obs = world.observe();

      // Convergence on a plateau of the episode-return moving average.
      std::size_t w = static_cast<std::size_t>(training.plateau_window);
      if (w > 0 && out.episode_returns.size() >= 2 * w) {
        auto tail = out.episode_returns.end();
        double recent = std::accumulate(tail - w, tail, 0.0) / w;
        double previous = std::accumulate(tail - 2 * w, tail - w, 0.0) / w;
        double denom = std::max(std::abs(previous), 1e-9);
        if (std::abs(recent - previous) / denom < training.plateau_rel_change) {
          out.plateau_reached = true;
          break;
        }
      }
    } else {
      obs = std::move(result.observation);
    }
  }
  return out;
}

TrainingResult run_training(const Scenario& scenario, const EnvConfig& env_config,
                            const Hyperparams& hyper, const TrainingConfig& training,
                            std::uint64_t seed,
                            const std::filesystem::path& out_dir,
                            const std::string& tag) {
  std::filesystem::create_directories(out_dir);
  TrainOutput out = train_dqn(scenario, env_config, hyper, training, seed);

  TrainingResult result;
  result.checkpoint_path = out_dir / (tag + "_qnet.txt");
  result.curve_path = out_dir / (tag + "_curve.csv");
  result.steps_run = out.steps_run;
  result.final_epsilon = hyper.epsilon_at(out.steps_run - 1);

  out.network.save_file(result.checkpoint_path);

  std::ofstream curve = open_output(result.curve_path);
  curve << "step,epsilon,loss,episode_return\n";
  for (const CurvePoint& p : out.curve) {
    curve << p.step << ',' << format_csv_double(p.epsilon) << ','
          << format_csv_double(p.loss) << ','
          << format_csv_double(p.episode_return) << '\n';
  }

  std::size_t w = std::min<std::size_t>(
      out.episode_returns.size(),
      std::max<std::size_t>(1, static_cast<std::size_t>(training.plateau_window)));
  if (!out.episode_returns.empty()) {
    result.mean_return_last_window =
        std::accumulate(out.episode_returns.end() - w, out.episode_returns.end(),
                        0.0) /
        static_cast<double>(w);
  }
  return result;
}

double MetricsRecord::mean_throughput_bps() const { return mean_of(user_throughput_bps); }
double MetricsRecord::mean_latency_s() const { return mean_of(user_latency_s); }
double MetricsRecord::median_throughput_bps() const { return median_of(user_throughput_bps); }
double MetricsRecord::median_latency_s() const { return median_of(user_latency_s); }

MetricsRecord evaluate_policy(const Scenario& scenario, const EnvConfig& env_config,
                              Policy& policy, std::uint64_t seed,
                              const EvalOptions& options) {
  if (options.episodes < 1) {
    throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
  }
  World world(scenario, env_config, seed);
  Rng policy_rng(substream_seed(seed, "policy"));
  int users = world.scenario().user_count();

  std::ofstream step_trace, user_trace, cache_trace;
  if (options.step_trace) {
    step_trace = open_output(*options.step_trace);
    step_trace << "interval,action,reward_total,utility_sum,sla_penalty,"
                  "overflow_penalty,util_mean_embb,util_mean_urllc,"
                  "util_mean_mbrllc,hit_ratio\n";
  }
  if (options.user_trace) {
    user_trace = open_output(*options.user_trace);
    user_trace << "interval,user,slice,bs,rbgs,rate_bps,throughput_bps,delay_s,"
                  "stable,hit,utility,delay_ok,rate_ok\n";
  }
  if (options.cache_trace) {
    cache_trace = open_output(*options.cache_trace);
    cache_trace << "interval,bs,hits,misses,occupancy_bits\n";
  }

  MetricsRecord record;
  record.user_throughput_bps.assign(users, 0.0);
  record.user_latency_s.assign(users, 0.0);
  record.user_slice.resize(users);
  for (int u = 0; u < users; ++u) record.user_slice[u] = world.scenario().users[u].slice;
  std::vector<double> user_utility_sum(users, 0.0);
  std::vector<long> user_satisfied(users, 0);
  long total_requests = 0;
  long total_hits = 0;
  double return_sum = 0.0;
  long intervals = 0;
  int global_interval = 0;

  for (int episode = 0; episode < options.episodes; ++episode) {
    if (episode > 0) world.reset();
    Observation obs = world.observe();
    double episode_return = 0.0;
    for (;;) {
      int action = policy.act(world, obs, policy_rng);
      StepResult result = world.step(action);
      episode_return += result.reward.total;
      ++intervals;
      for (const UserStepRecord& rec : result.metrics.users) {
        record.user_throughput_bps[rec.user] += rec.throughput_bps;
        record.user_latency_s[rec.user] += rec.delay.total_s;
        user_utility_sum[rec.user] += rec.utility;
        user_satisfied[rec.user] += (rec.delay_ok && rec.rate_ok) ? 1 : 0;
      }
      total_requests += result.metrics.requests;
      total_hits += result.metrics.hits;

      if (options.step_trace) {
        const auto& m = result.metrics;
        double hit_ratio =
            m.requests > 0 ? static_cast<double>(m.hits) / m.requests : 0.0;
        step_trace << global_interval << ',' << action << ','
                   << format_csv_double(result.reward.total) << ','
                   << format_csv_double(result.reward.utility_sum) << ','
                   << format_csv_double(result.reward.sla_penalty) << ','
                   << format_csv_double(result.reward.overflow_penalty) << ','
                   << format_csv_double(m.slice_utility_mean[0]) << ','
                   << format_csv_double(m.slice_utility_mean[1]) << ','
                   << format_csv_double(m.slice_utility_mean[2]) << ','
                   << format_csv_double(hit_ratio) << '\n';
      }
      if (options.user_trace) {
        for (const UserStepRecord& rec : result.metrics.users) {
          user_trace << global_interval << ',' << rec.user << ','
                     << slice_name(rec.slice) << ',' << rec.bs << ',' << rec.rbgs
                     << ',' << format_csv_double(rec.rate_bps) << ','
                     << format_csv_double(rec.throughput_bps) << ','
                     << format_csv_double(rec.delay.total_s) << ','
                     << (rec.delay.stable ? 1 : 0) << ',' << rec.hit << ','
                     << format_csv_double(rec.utility) << ','
                     << (rec.delay_ok ? 1 : 0) << ',' << (rec.rate_ok ? 1 : 0)
                     << '\n';
        }
      }
      if (options.cache_trace) {
        for (int m = 0; m < world.scenario().bs_count(); ++m) {
          cache_trace << global_interval << ',' << m << ','
                      << result.metrics.bs_hits[m] << ','
                      << result.metrics.bs_requests[m] - result.metrics.bs_hits[m]
                      << ','
                      << format_csv_double(result.metrics.bs_occupancy_bits[m])
                      << '\n';
        }
      }

      ++global_interval;
      obs = std::move(result.observation);
      if (result.done) break;
    }
    return_sum += episode_return;
  }

  double per_user_intervals = static_cast<double>(intervals);
  for (int u = 0; u < users; ++u) {
    record.user_throughput_bps[u] /= per_user_intervals;
    record.user_latency_s[u] /= per_user_intervals;
    user_utility_sum[u] /= per_user_intervals;
  }
  record.episode_return = return_sum / options.episodes;
  record.cache_hit_ratio =
      total_requests > 0 ? static_cast<double>(total_hits) / total_requests : 0.0;

  std::array<long, kSliceCount> slice_users = {0, 0, 0};
  std::array<long, kSliceCount> slice_satisfied = {0, 0, 0};
  long satisfied_total = 0;
  for (int u = 0; u < users; ++u) {
    int s = slice_index(record.user_slice[u]);
    slice_users[s] += intervals;
    slice_satisfied[s] += user_satisfied[u];
    satisfied_total += user_satisfied[u];
  }
  for (int s = 0; s < kSliceCount; ++s) {
    record.sla_per_slice[s] =
        slice_users[s] > 0
            ? static_cast<double>(slice_satisfied[s]) / slice_users[s]
            : 1.0;
  }
  record.sla_overall = static_cast<double>(satisfied_total) /
                       (static_cast<double>(users) * per_user_intervals);

  // JFI over per-user mean utilities within each slice; all-equal (zero)
  // scores count as perfectly fair.
  for (Slice s : kAllSlices) {
    std::vector<double> scores;
    bool any_positive = false;
    for (int u = 0; u < users; ++u) {
      if (record.user_slice[u] == s) {
        scores.push_back(user_utility_sum[u]);
        any_positive = any_positive || user_utility_sum[u] > 0.0;
      }
    }
    record.jfi_per_slice[slice_index(s)] =
        scores.empty() ? 1.0 : (any_positive ? jain_fairness(scores) : 1.0);
  }
  return record;
}

std::string_view sweep_mode_name(SweepMode mode) {
  switch (mode) {
    case SweepMode::kKappa:
      return "kappa";
    case SweepMode::kServers:
      return "servers";
    case SweepMode::kAblation:
      return "ablation";
  }
  return "unknown";
}

std::optional<SweepMode> sweep_mode_from_name(std::string_view name) {
  for (SweepMode mode :
       {SweepMode::kKappa, SweepMode::kServers, SweepMode::kAblation}) {
    if (sweep_mode_name(mode) == name) return mode;
  }
  return std::nullopt;
}

std::span<const AblationRow> ablation_rows() {
  static const std::array<AblationRow, 6> rows = {{
      {"baseline", false, false, PolicyKind::kStaticEqual,
       UtilityShaping::kUniformBalanced},
      {"caching", true, true, PolicyKind::kStaticEqual,
       UtilityShaping::kUniformBalanced},
      {"dqn", true, true, PolicyKind::kDqn, UtilityShaping::kUniformBalanced},
      {"latency_shaping", true, true, PolicyKind::kDqn,
       UtilityShaping::kLatencyFocused},
      {"throughput_shaping", true, true, PolicyKind::kDqn,
       UtilityShaping::kThroughputFocused},
      {"full", true, true, PolicyKind::kDqn, UtilityShaping::kSliceMatched},
  }};
  return rows;
}

void SweepSpec::validate() const {
  if (mode != SweepMode::kAblation && values.empty()) {
    throw std::invalid_argument("SweepSpec: value list must be nonempty");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("SweepSpec: seed list must be nonempty");
  }
  if (jobs < 1) throw std::invalid_argument("SweepSpec: jobs must be >= 1");
}

namespace {

struct SweepPointConfig {
  std::string label;
  Scenario scenario;
  EnvConfig env;
  PolicyKind policy = PolicyKind::kStaticEqual;
  bool shares_training = false;  // true when one checkpoint serves all values
};

std::unique_ptr<Policy> instantiate_policy(PolicyKind kind,
                                           const std::optional<QNetwork>& net) {
  if (kind == PolicyKind::kDqn) {
    if (!net) throw std::logic_error("sweep: missing trained network");
    return std::make_unique<DqnPolicy>(*net);
  }
  return make_baseline(kind);
}

}  // namespace

void run_sweep(const Scenario& scenario, const EnvConfig& env_config,
               const Hyperparams& hyper, const TrainingConfig& training,
               const SweepSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  env_config.validate();
  std::filesystem::create_directories(out_dir);

  std::vector<SweepPointConfig> configs;
  switch (spec.mode) {
    case SweepMode::kKappa: {
      for (double v : spec.values) {
        SweepPointConfig c{format_csv_double(v), scenario, env_config,
                           spec.policy, false};
        if (v < 0.0 || v > 1.0) {
          throw std::invalid_argument("run_sweep: kappa values must be in [0, 1]");
        }
        c.env.gain.kappa = v;
        configs.push_back(std::move(c));
      }
      break;
    }
    case SweepMode::kServers: {
      for (double v : spec.values) {
        int k = static_cast<int>(std::lround(v));
        if (k < 1 || k > scenario.bs_count()) {
          throw std::invalid_argument(
              "run_sweep: server counts must be within [1, bs_count]");
        }
        SweepPointConfig c{std::to_string(k), scenario, env_config, spec.policy,
                           true};
        for (BaseStation& bs : c.scenario.base_stations) {
          bs.edge_server = bs.id < k;  // lowest ids keep their caches
        }
        configs.push_back(std::move(c));
      }
      break;
    }
    case SweepMode::kAblation: {
      for (const AblationRow& row : ablation_rows()) {
        SweepPointConfig c{std::string(row.name), scenario, env_config,
                           row.policy, false};
        c.env.caching_enabled = row.caching;
        c.env.prewarm_caches = row.prewarm;
        c.env.shaping = row.shaping;
        configs.push_back(std::move(c));
      }
      break;
    }
  }

  // Resolve the policy network(s): a provided checkpoint serves every value;
  // otherwise DQN configs train once per value (server sweeps share one
  // training on the base scenario, since only the evaluation topology
  // changes).
  int n_configs = static_cast<int>(configs.size());
  std::vector<std::optional<QNetwork>> nets(n_configs);
  if (spec.checkpoint) {
    QNetwork net = QNetwork::load_file(*spec.checkpoint);
    for (int i = 0; i < n_configs; ++i) {
      if (configs[i].policy == PolicyKind::kDqn) nets[i] = net;
    }
  } else {
    bool shared_done = false;
    std::optional<QNetwork> shared;
    std::vector<int> to_train;
    for (int i = 0; i < n_configs; ++i) {
      if (configs[i].policy != PolicyKind::kDqn) continue;
      if (configs[i].shares_training) {
        if (!shared_done) {
          shared = train_dqn(scenario, env_config, hyper, training,
                             spec.train_seed)
                       .network;
          shared_done = true;
        }
        nets[i] = shared;
      } else {
        to_train.push_back(i);
      }
    }
    parallel_for(static_cast<int>(to_train.size()), spec.jobs, [&](int t) {
      int i = to_train[t];
      nets[i] = train_dqn(configs[i].scenario, configs[i].env, hyper, training,
                          spec.train_seed)
                    .network;
    });
  }

  // Evaluate all (value, seed) points.
  int n_seeds = static_cast<int>(spec.seeds.size());
  std::vector<MetricsRecord> results(static_cast<std::size_t>(n_configs) * n_seeds);
  parallel_for(n_configs * n_seeds, spec.jobs, [&](int task) {
    int ci = task / n_seeds;
    int si = task % n_seeds;
    std::unique_ptr<Policy> policy =
        instantiate_policy(configs[ci].policy, nets[ci]);
    results[task] = evaluate_policy(configs[ci].scenario, configs[ci].env,
                                    *policy, spec.seeds[si]);
  });

  // metrics.csv: one row per (value, seed), in spec order.
  {
    std::ofstream out = open_output(out_dir / "metrics.csv");
    out << "mode,label,seed,median_throughput_bps,mean_throughput_bps,"
           "median_latency_s,mean_latency_s,jfi_embb,jfi_urllc,jfi_mbrllc,"
           "sla_embb,sla_urllc,sla_mbrllc,sla_overall,cache_hit_ratio,"
           "episode_return\n";
    for (int ci = 0; ci < n_configs; ++ci) {
      for (int si = 0; si < n_seeds; ++si) {
        const MetricsRecord& r = results[static_cast<std::size_t>(ci) * n_seeds + si];
        out << sweep_mode_name(spec.mode) << ',' << configs[ci].label << ','
            << spec.seeds[si] << ','
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
    }
  }

  // summary.csv: seed-averaged per value.
  {
    std::ofstream out = open_output(out_dir / "summary.csv");
    out << "mode,label,median_throughput_bps,mean_throughput_bps,"
           "median_latency_s,mean_latency_s,jfi_embb,jfi_urllc,jfi_mbrllc,"
           "sla_embb,sla_urllc,sla_mbrllc,sla_overall,cache_hit_ratio,"
           "episode_return\n";
    for (int ci = 0; ci < n_configs; ++ci) {
      std::array<double, 13> acc{};
      for (int si = 0; si < n_seeds; ++si) {
        const MetricsRecord& r = results[static_cast<std::size_t>(ci) * n_seeds + si];
        int k = 0;
        acc[k++] += r.median_throughput_bps();
        acc[k++] += r.mean_throughput_bps();
        acc[k++] += r.median_latency_s();
        acc[k++] += r.mean_latency_s();
        acc[k++] += r.jfi_per_slice[0];
        acc[k++] += r.jfi_per_slice[1];
        acc[k++] += r.jfi_per_slice[2];
        acc[k++] += r.sla_per_slice[0];
        acc[k++] += r.sla_per_slice[1];
        acc[k++] += r.sla_per_slice[2];
        acc[k++] += r.sla_overall;
        acc[k++] += r.cache_hit_ratio;
        acc[k++] += r.episode_return;
      }
      out << sweep_mode_name(spec.mode) << ',' << configs[ci].label;
      for (double v : acc) out << ',' << format_csv_double(v / n_seeds);
      out << '\n';
    }
  }

  // Per-user samples for CDF plots.
  {
    std::ofstream tput = open_output(out_dir / "throughput_samples.csv");
    std::ofstream lat = open_output(out_dir / "latency_samples.csv");
    tput << "label,seed,user,slice,throughput_bps\n";
    lat << "label,seed,user,slice,latency_s\n";
    for (int ci = 0; ci < n_configs; ++ci) {
      for (int si = 0; si < n_seeds; ++si) {
        const MetricsRecord& r = results[static_cast<std::size_t>(ci) * n_seeds + si];
        for (std::size_t u = 0; u < r.user_throughput_bps.size(); ++u) {
          tput << configs[ci].label << ',' << spec.seeds[si] << ',' << u << ','
               << slice_name(r.user_slice[u]) << ','
               << format_csv_double(r.user_throughput_bps[u]) << '\n';
          lat << configs[ci].label << ',' << spec.seeds[si] << ',' << u << ','
              << slice_name(r.user_slice[u]) << ','
              << format_csv_double(r.user_latency_s[u]) << '\n';
        }
      }
    }
  }

  // Table-shaped ablation file.
  if (spec.mode == SweepMode::kAblation) {
    std::ofstream out = open_output(out_dir / "ablation.csv");
    out << "configuration,latency_s,throughput_bps,sla_satisfaction\n";
    for (int ci = 0; ci < n_configs; ++ci) {
      double lat = 0.0, tput = 0.0, sla = 0.0;
      for (int si = 0; si < n_seeds; ++si) {
        const MetricsRecord& r = results[static_cast<std::size_t>(ci) * n_seeds + si];
        lat += r.median_latency_s();
        tput += r.median_throughput_bps();
        sla += r.sla_overall;
      }
      out << configs[ci].label << ',' << format_csv_double(lat / n_seeds) << ','
          << format_csv_double(tput / n_seeds) << ','
          << format_csv_double(sla / n_seeds) << '\n';
    }
  }
}

void export_cdf(std::vector<double> samples, std::ostream& out) {
  if (samples.empty()) throw std::invalid_argument("export_cdf: empty input");
  std::sort(samples.begin(), samples.end());
  out << "value,cum_fraction\n";
  std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    out << format_csv_double(samples[i]) << ','
        << format_csv_double(static_cast<double>(i + 1) / static_cast<double>(n))
        << '\n';
  }
}

std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv_column: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("read_csv_column: empty file " + path.string());
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::vector<std::string> names = split(header);
  auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) {
    throw std::runtime_error("read_csv_column: no column `" + column + "` in " +
                             path.string());
  }
  std::size_t index = static_cast<std::size_t>(it - names.begin());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() <= index) {
      throw std::runtime_error("read_csv_column: short row in " + path.string());
    }
    try {
      values.push_back(std::stod(cells[index]));
    } catch (const std::exception&) {
      throw std::runtime_error("read_csv_column: non-numeric cell `" +
                               cells[index] + "` in " + path.string());
    }
  }
  return values;
}

std::string_view utility_shaping_name(UtilityShaping shaping) {
  switch (shaping) {
    case UtilityShaping::kSliceMatched:
      return "slice_matched";
    case UtilityShaping::kUniformBalanced:
      return "uniform_balanced";
    case UtilityShaping::kLatencyFocused:
      return "latency_focused";
    case UtilityShaping::kThroughputFocused:
      return "throughput_focused";
  }
  return "unknown";
}

std::optional<UtilityShaping> utility_shaping_from_name(std::string_view name) {
  for (UtilityShaping s :
       {UtilityShaping::kSliceMatched, UtilityShaping::kUniformBalanced,
        UtilityShaping::kLatencyFocused, UtilityShaping::kThroughputFocused}) {
    if (utility_shaping_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

[[noreturn]] void fail_experiment(const std::string& message) {
  throw ConfigError("experiment config: " + message);
}

void check_exp_keys(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      fail_experiment("unknown key `" +
                      (scope.empty() ? it.key() : scope + "." + it.key()) + "`");
    }
  }
}

double exp_double(const json& obj, const std::string& scope, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    fail_experiment("`" + scope + "." + key + "` must be a number");
  }
  return obj.at(key).get<double>();
}

int exp_int(const json& obj, const std::string& scope, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) {
    fail_experiment("`" + scope + "." + key + "` must be an integer");
  }
  return obj.at(key).get<int>();
}

bool exp_bool(const json& obj, const std::string& scope, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) {
    fail_experiment("`" + scope + "." + key + "` must be a boolean");
  }
  return obj.at(key).get<bool>();
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail_experiment(std::string("parse failure: ") + e.what());
  }
  if (!root.is_object()) fail_experiment("top level must be an object");
  check_exp_keys(root, "", {"env", "dqn", "training"});

  ExperimentConfig config;
  if (root.contains("env")) {
    const json& env = root.at("env");
    if (!env.is_object()) fail_experiment("`env` must be an object");
    check_exp_keys(env, "env",
                   {"delta", "kappa", "lambda_sla", "lambda_overflow", "horizon",
                    "utility_shaping", "caching_enabled", "prewarm_caches",
                    "delay_cap_multiplier", "template_count", "pathloss_ref_db",
                    "pathloss_exponent", "noise_dbm_per_rbg",
                    "reference_spectral_eff", "counter_decay"});
    EnvConfig& e = config.env;
    e.gain.delta = exp_double(env, "env", "delta", e.gain.delta);
    e.gain.kappa = exp_double(env, "env", "kappa", e.gain.kappa);
    e.lambda_sla = exp_double(env, "env", "lambda_sla", e.lambda_sla);
    e.lambda_overflow = exp_double(env, "env", "lambda_overflow", e.lambda_overflow);
    e.horizon = exp_int(env, "env", "horizon", e.horizon);
    if (env.contains("utility_shaping")) {
      if (!env.at("utility_shaping").is_string()) {
        fail_experiment("`env.utility_shaping` must be a string");
      }
      auto shaping =
          utility_shaping_from_name(env.at("utility_shaping").get<std::string>());
      if (!shaping) fail_experiment("`env.utility_shaping` has an unknown value");
      e.shaping = *shaping;
    }
    e.caching_enabled = exp_bool(env, "env", "caching_enabled", e.caching_enabled);
    e.prewarm_caches = exp_bool(env, "env", "prewarm_caches", e.prewarm_caches);
    e.delay_cap_multiplier =
        exp_double(env, "env", "delay_cap_multiplier", e.delay_cap_multiplier);
    e.template_count = exp_int(env, "env", "template_count", e.template_count);
    e.pathloss.ref_loss_db =
        exp_double(env, "env", "pathloss_ref_db", e.pathloss.ref_loss_db);
    e.pathloss.exponent =
        exp_double(env, "env", "pathloss_exponent", e.pathloss.exponent);
    e.noise_dbm_per_rbg =
        exp_double(env, "env", "noise_dbm_per_rbg", e.noise_dbm_per_rbg);
    e.reference_spectral_eff =
        exp_double(env, "env", "reference_spectral_eff", e.reference_spectral_eff);
    e.counter_decay = exp_double(env, "env", "counter_decay", e.counter_decay);
  }
  if (root.contains("dqn")) {
    const json& dqn = root.at("dqn");
    if (!dqn.is_object()) fail_experiment("`dqn` must be an object");
    check_exp_keys(dqn, "dqn",
                   {"gamma", "learning_rate", "eps_start", "eps_end",
                    "eps_decay_steps", "tau", "batch_size", "buffer_capacity",
                    "train_start", "alpha_prio", "beta_start", "beta_end",
                    "hidden", "grad_clip_norm", "train_every"});
    Hyperparams& h = config.dqn;
    h.gamma = exp_double(dqn, "dqn", "gamma", h.gamma);
    h.learning_rate = exp_double(dqn, "dqn", "learning_rate", h.learning_rate);
    h.eps_start = exp_double(dqn, "dqn", "eps_start", h.eps_start);
    h.eps_end = exp_double(dqn, "dqn", "eps_end", h.eps_end);
    h.eps_decay_steps = exp_int(dqn, "dqn", "eps_decay_steps", h.eps_decay_steps);
    h.tau = exp_double(dqn, "dqn", "tau", h.tau);
    h.batch_size = exp_int(dqn, "dqn", "batch_size", h.batch_size);
    h.buffer_capacity = static_cast<std::size_t>(exp_int(
        dqn, "dqn", "buffer_capacity", static_cast<int>(h.buffer_capacity)));
    h.train_start = exp_int(dqn, "dqn", "train_start", h.train_start);
    h.alpha_prio = exp_double(dqn, "dqn", "alpha_prio", h.alpha_prio);
    h.beta_start = exp_double(dqn, "dqn", "beta_start", h.beta_start);
    h.beta_end = exp_double(dqn, "dqn", "beta_end", h.beta_end);
    if (dqn.contains("hidden")) {
      const json& hidden = dqn.at("hidden");
      if (!hidden.is_array()) fail_experiment("`dqn.hidden` must be an array");
      h.hidden.clear();
      for (const json& v : hidden) {
        if (!v.is_number_integer() || v.get<int>() < 1) {
          fail_experiment("`dqn.hidden` entries must be positive integers");
        }
        h.hidden.push_back(v.get<int>());
      }
    }
    h.grad_clip_norm = exp_double(dqn, "dqn", "grad_clip_norm", h.grad_clip_norm);
    h.train_every = exp_int(dqn, "dqn", "train_every", h.train_every);
  }
  if (root.contains("training")) {
    const json& tr = root.at("training");
    if (!tr.is_object()) fail_experiment("`training` must be an object");
    check_exp_keys(tr, "training",
                   {"max_steps", "plateau_window", "plateau_rel_change"});
    TrainingConfig& t = config.training;
    t.max_steps = exp_int(tr, "training", "max_steps", t.max_steps);
    t.plateau_window = exp_int(tr, "training", "plateau_window", t.plateau_window);
    t.plateau_rel_change =
        exp_double(tr, "training", "plateau_rel_change", t.plateau_rel_change);
  }
  try {
    config.env.validate();
    config.dqn.validate();
    config.training.validate();
  } catch (const std::invalid_argument& e) {
    fail_experiment(e.what());
  }
  return config;
}

ExperimentConfig load_experiment_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("experiment config: cannot open file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_experiment_config(buffer.str());
}

}  // namespace slicesim
