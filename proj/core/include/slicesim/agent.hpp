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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "slicesim/env.hpp"
#include "slicesim/rng.hpp"

namespace slicesim {

/// Feed-forward Q-network: affine layers with rectifier hidden activations
/// and a linear output, one value per action. Parameters live in one flat
/// vector (per layer: weights row-major out x in, then biases) so the
/// optimizer, soft updates, and checkpointing all work on a single view.
class QNetwork {
 public:
  /// Uniform fan-in scaled initialization, drawn from `rng`.
  QNetwork(std::vector<int> layer_sizes, Rng& rng);

  /// All-zero parameters (useful for fixtures).
  static QNetwork zeros(std::vector<int> layer_sizes);

  std::vector<double> forward(std::span<const double> input) const;

  /// Q-learning regression batch: per sample an observation, the taken
  /// action, a frozen target value, and an importance weight.
  struct Batch {
    std::vector<std::vector<double>> observations;
    std::vector<int> actions;
    std::vector<double> targets;
    std::vector<double> weights;

    std::size_t size() const { return observations.size(); }
  };

  /// Importance-weighted mean squared TD loss and its gradient:
  /// L = (1/B) sum_i w_i * (Q(s_i, a_i) - y_i)^2. Appends nothing to
  /// `gradient`; it is resized and overwritten. When `td_errors` is given it
  /// receives y_i - Q(s_i, a_i) per sample.
  double loss_and_gradient(const Batch& batch, std::vector<double>& gradient,
                           std::vector<double>* td_errors = nullptr) const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<int>& layer_sizes() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  /// Plain-text checkpoint: a `layers` header line then one parameter per
  /// line, printed with full round-trip precision.
  void save(std::ostream& out) const;
  void save_file(const std::filesystem::path& path) const;
  static QNetwork load(std::istream& in);
  static QNetwork load_file(const std::filesystem::path& path);

 private:
  explicit QNetwork(std::vector<int> layer_sizes);

  std::vector<int> dims_;
  std::vector<double> params_;
  std::vector<std::size_t> weight_offsets_;  // per layer
  std::vector<std::size_t> bias_offsets_;
};

/// theta_target <- tau * theta_online + (1 - tau) * theta_target.
void soft_update(QNetwork& target, const QNetwork& online, double tau);

/// Epsilon-greedy: uniform action with probability epsilon, else the argmax
/// with lowest-index tie-break.
int select_action(std::span<const double> q_values, double epsilon, Rng& rng);

/// Gradient descent with first/second-moment per-parameter step scaling.
class MomentOptimizer {
 public:
  MomentOptimizer(std::size_t param_count, double learning_rate,
                  double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::vector<double>& params, std::span<const double> gradient);

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<double> m_, v_;
};

/// Scales `gradient` down to the given L2 norm when it exceeds it. Returns
/// the pre-clip norm.
double clip_gradient_norm(std::vector<double>& gradient, double max_norm);

struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

/// Ring buffer with proportional prioritized sampling. Priorities are kept
/// as p^alpha in a sum tree; fresh records enter at the current maximum
/// priority so everything is replayed at least once.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double alpha_prio);

  void push(Experience experience);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  struct Draw {
    std::vector<std::size_t> indices;
    std::vector<double> weights;  // importance weights, normalized by batch max
  };

  /// Samples `batch` indices with probability proportional to p^alpha, with
  /// replacement. beta is the importance-correction exponent.
  Draw sample(std::size_t batch, double beta, Rng& rng);

  /// Refreshes priorities to |td| + floor after a training step.
  void update_priorities(std::span<const std::size_t> indices,
                         std::span<const double> td_abs);

  const Experience& at(std::size_t index) const { return data_.at(index); }
  double sampling_probability(std::size_t index) const;

  static constexpr double kPriorityFloor = 1e-3;

 private:
  std::size_t capacity_;
  double alpha_;
  std::vector<Experience> data_;
  std::vector<double> tree_;  // sum tree over capacity leaves, stores p^alpha
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double max_priority_ = 1.0;

  void tree_set(std::size_t leaf, double value);
  std::size_t tree_find(double mass) const;
  double tree_total() const;
};

/// Exploration schedule, training thresholds, and network shape.
struct Hyperparams {
  double gamma = 0.99;
  double learning_rate = 1e-3;
  double eps_start = 1.0;
  double eps_end = 0.05;
  int eps_decay_steps = 20000;
  double tau = 0.005;
  int batch_size = 64;
  std::size_t buffer_capacity = 50000;
  int train_start = 1000;  // buffer size before training begins
  double alpha_prio = 0.6;
  double beta_start = 0.4;
  double beta_end = 1.0;
  std::vector<int> hidden = {128, 128};
  double grad_clip_norm = 10.0;
  int train_every = 1;

  void validate() const;
  double epsilon_at(int step) const;
  double beta_at(int step, int total_steps) const;
};

/// Bootstrap target y = r + gamma * (1 - done) * max_a' Q_target(s', a').
double td_target(const QNetwork& target, const Experience& experience,
                 double gamma);

/// One prioritized minibatch update of the online network:
/// y = r + gamma * (1 - done) * max_a' Q_target(s', a'), importance-weighted
/// MSE, one optimizer step, priorities refreshed to |TD|+floor. Returns the
/// batch loss. Throws std::runtime_error while the buffer is under the
/// train-start threshold.
double train_step(ReplayBuffer& buffer, QNetwork& online, const QNetwork& target,
                  MomentOptimizer& optimizer, const Hyperparams& hyper,
                  double beta, Rng& rng);

enum class PolicyKind {
  kDqn,
  kStaticEqual,
  kFairnessDriven,
  kGreedyOneStep,
  kRandom,
  kNoCache,
};

std::string_view policy_kind_name(PolicyKind kind);
std::optional<PolicyKind> policy_kind_from_name(std::string_view name);

/// A control policy: maps the current world/observation to an action index.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int act(const World& world, const Observation& observation, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

/// Greedy policy over a frozen Q-network (epsilon 0 unless configured).
class DqnPolicy : public Policy {
 public:
  explicit DqnPolicy(QNetwork network, double epsilon = 0.0);
  int act(const World& world, const Observation& observation, Rng& rng) override;
  std::string name() const override { return "dqn"; }
  const QNetwork& network() const { return network_; }

 private:
  QNetwork network_;
  double epsilon_;
};

/// Baselines:
///   static-equal     the equal split, no cache op, regardless of state
///   fairness-driven  template maximizing one-step-ahead JFI of utilities
///   greedy-one-step  immediate-reward argmax over all actions on clones
///   random           uniform over the action space
///   no-cache         static split, meant for caching-disabled worlds
/// Throws std::invalid_argument for kDqn (which needs a checkpoint).
std::unique_ptr<Policy> make_baseline(PolicyKind kind);

}  // namespace slicesim
