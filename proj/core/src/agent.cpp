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

#include "slicesim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slicesim {

namespace {

double relu(double x) { return x > 0.0 ? x : 0.0; }

std::string format_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

QNetwork::QNetwork(std::vector<int> layer_sizes) : dims_(std::move(layer_sizes)) {
  if (dims_.size() < 2) {
    throw std::invalid_argument("QNetwork: need at least input and output layers");
  }
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("QNetwork: layer sizes must be >= 1");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    weight_offsets_.push_back(total);
    total += static_cast<std::size_t>(dims_[l + 1]) * dims_[l];
    bias_offsets_.push_back(total);
    total += dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

QNetwork::QNetwork(std::vector<int> layer_sizes, Rng& rng)
    : QNetwork(std::move(layer_sizes)) {
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    std::size_t begin = weight_offsets_[l];
    std::size_t end = bias_offsets_[l] + dims_[l + 1];
    for (std::size_t i = begin; i < end; ++i) {
      params_[i] = rng.uniform(-bound, bound);
    }
  }
}

QNetwork QNetwork::zeros(std::vector<int> layer_sizes) {
  return QNetwork(std::move(layer_sizes));
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != dims_.front()) {
    throw std::invalid_argument("QNetwork::forward: input dimension mismatch");
  }
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    int in_dim = dims_[l];
    int out_dim = dims_[l + 1];
    const double* w = params_.data() + weight_offsets_[l];
    const double* b = params_.data() + bias_offsets_[l];
    next.assign(out_dim, 0.0);
    for (int o = 0; o < out_dim; ++o) {
      double z = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) z += row[i] * current[i];
      next[o] = (l + 2 < dims_.size()) ? relu(z) : z;  // linear output layer
    }
    current.swap(next);
  }
  return current;
}

double QNetwork::loss_and_gradient(const Batch& batch, std::vector<double>& gradient,
                                   std::vector<double>* td_errors) const {
  std::size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("QNetwork::loss_and_gradient: empty batch");
  if (batch.actions.size() != n || batch.targets.size() != n ||
      batch.weights.size() != n) {
    throw std::invalid_argument("QNetwork::loss_and_gradient: ragged batch");
  }
  gradient.assign(params_.size(), 0.0);
  if (td_errors) td_errors->assign(n, 0.0);

  std::size_t layers = dims_.size() - 1;
  // Per-layer activations (post-nonlinearity) and pre-activations.
  std::vector<std::vector<double>> acts(layers + 1);
  std::vector<std::vector<double>> pre(layers);
  double loss = 0.0;

  for (std::size_t s = 0; s < n; ++s) {
    const std::vector<double>& x = batch.observations[s];
    if (static_cast<int>(x.size()) != dims_.front()) {
      throw std::invalid_argument("QNetwork::loss_and_gradient: input dimension mismatch");
    }
    acts[0] = x;
    for (std::size_t l = 0; l < layers; ++l) {
      int in_dim = dims_[l];
      int out_dim = dims_[l + 1];
      const double* w = params_.data() + weight_offsets_[l];
      const double* b = params_.data() + bias_offsets_[l];
      pre[l].assign(out_dim, 0.0);
      acts[l + 1].assign(out_dim, 0.0);
      for (int o = 0; o < out_dim; ++o) {
        double z = b[o];
        const double* row = w + static_cast<std::size_t>(o) * in_dim;
        for (int i = 0; i < in_dim; ++i) z += row[i] * acts[l][i];
        pre[l][o] = z;
        acts[l + 1][o] = (l + 1 < layers) ? relu(z) : z;
      }
    }

    int action = batch.actions[s];
    if (action < 0 || action >= dims_.back()) {
      throw std::invalid_argument("QNetwork::loss_and_gradient: action out of range");
    }
    double q = acts[layers][action];
    double diff = q - batch.targets[s];
    double w_i = batch.weights[s];
    loss += w_i * diff * diff / static_cast<double>(n);
    if (td_errors) (*td_errors)[s] = batch.targets[s] - q;

    // Backward pass; only the taken action carries output error.
    std::vector<double> delta(dims_.back(), 0.0);
    delta[action] = 2.0 * w_i * diff / static_cast<double>(n);
    for (std::size_t l = layers; l-- > 0;) {
      int in_dim = dims_[l];
      int out_dim = dims_[l + 1];
      double* gw = gradient.data() + weight_offsets_[l];
      double* gb = gradient.data() + bias_offsets_[l];
      for (int o = 0; o < out_dim; ++o) {
        double d = delta[o];
        if (d == 0.0) continue;
        double* grow = gw + static_cast<std::size_t>(o) * in_dim;
        for (int i = 0; i < in_dim; ++i) grow[i] += d * acts[l][i];
        gb[o] += d;
      }
      if (l == 0) break;
      const double* w = params_.data() + weight_offsets_[l];
      std::vector<double> prev(in_dim, 0.0);
      for (int o = 0; o < out_dim; ++o) {
        double d = delta[o];
        if (d == 0.0) continue;
        const double* row = w + static_cast<std::size_t>(o) * in_dim;
        for (int i = 0; i < in_dim; ++i) prev[i] += row[i] * d;
      }
      for (int i = 0; i < in_dim; ++i) {
        if (pre[l - 1][i] <= 0.0) prev[i] = 0.0;  // rectifier derivative
      }
      delta.swap(prev);
    }
  }
  return loss;
}

void QNetwork::save(std::ostream& out) const {
  out << "slicesim-qnet 1\n";
  out << "layers " << dims_.size();
  for (int d : dims_) out << ' ' << d;
  out << '\n';
  for (double p : params_) out << format_param(p) << '\n';
}

void QNetwork::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);  // binary: fixed newlines everywhere
  if (!out) throw std::runtime_error("QNetwork::save_file: cannot open " + path.string());
  save(out);
  if (!out) throw std::runtime_error("QNetwork::save_file: write failed " + path.string());
}

QNetwork QNetwork::load(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "slicesim-qnet" || version != 1) {
    throw std::runtime_error("QNetwork::load: bad checkpoint header");
  }
  std::string tag;
  std::size_t layer_count = 0;
  if (!(in >> tag >> layer_count) || tag != "layers" || layer_count < 2) {
    throw std::runtime_error("QNetwork::load: bad layers line");
  }
  std::vector<int> dims(layer_count);
  for (std::size_t i = 0; i < layer_count; ++i) {
    if (!(in >> dims[i]) || dims[i] < 1) {
      throw std::runtime_error("QNetwork::load: bad layer size");
    }
  }
  QNetwork net(dims);
  for (std::size_t i = 0; i < net.params_.size(); ++i) {
    if (!(in >> net.params_[i])) {
      throw std::runtime_error("QNetwork::load: truncated parameters");
    }
  }
  return net;
}

QNetwork QNetwork::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("QNetwork::load_file: cannot open " + path.string());
  return load(in);
}

void soft_update(QNetwork& target, const QNetwork& online, double tau) {
  if (target.layer_sizes() != online.layer_sizes()) {
    throw std::invalid_argument("soft_update: architecture mismatch");
  }
  if (tau < 0.0 || tau > 1.0) {
    throw std::invalid_argument("soft_update: tau must be in [0, 1]");
  }
  std::vector<double>& t = target.params();
  const std::vector<double>& o = online.params();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = tau * o[i] + (1.0 - tau) * t[i];
  }
}

int select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (q_values.empty()) throw std::invalid_argument("select_action: empty Q-vector");
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("select_action: epsilon must be in [0, 1]");
  }
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return rng.uniform_int(static_cast<int>(q_values.size()));
  }
  int best = 0;
  for (std::size_t i = 1; i < q_values.size(); ++i) {
    if (q_values[i] > q_values[best]) best = static_cast<int>(i);
  }
  return best;
}

MomentOptimizer::MomentOptimizer(std::size_t param_count, double learning_rate,
                                 double beta1, double beta2, double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(param_count, 0.0),
      v_(param_count, 0.0) {
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("MomentOptimizer: learning rate must be positive");
  }
}

void MomentOptimizer::step(std::vector<double>& params,
                           std::span<const double> gradient) {
  if (params.size() != m_.size() || gradient.size() != m_.size()) {
    throw std::invalid_argument("MomentOptimizer::step: size mismatch");
  }
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, t_);
  double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * gradient[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * gradient[i] * gradient[i];
    double m_hat = m_[i] / bc1;
    double v_hat = v_[i] / bc2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

double clip_gradient_norm(std::vector<double>& gradient, double max_norm) {
  if (max_norm <= 0.0) {
    throw std::invalid_argument("clip_gradient_norm: max_norm must be positive");
  }
  double sum_sq = 0.0;
  for (double g : gradient) sum_sq += g * g;
  double norm = std::sqrt(sum_sq);
  if (norm > max_norm) {
    double scale = max_norm / norm;
    for (double& g : gradient) g *= scale;
  }
  return norm;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha_prio)
    : capacity_(capacity), alpha_(alpha_prio) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  if (alpha_prio < 0.0) throw std::invalid_argument("ReplayBuffer: negative alpha");
  std::size_t leaves = 1;
  while (leaves < capacity_) leaves <<= 1;
  tree_.assign(2 * leaves, 0.0);
  data_.resize(capacity_);
}

void ReplayBuffer::tree_set(std::size_t leaf, double value) {
  std::size_t base = tree_.size() / 2;
  std::size_t pos = base + leaf;
  tree_[pos] = value;
  while (pos > 1) {
    pos >>= 1;
    tree_[pos] = tree_[2 * pos] + tree_[2 * pos + 1];
  }
}

std::size_t ReplayBuffer::tree_find(double mass) const {
  std::size_t base = tree_.size() / 2;
  std::size_t pos = 1;
  while (pos < base) {
    std::size_t left = 2 * pos;
    if (mass < tree_[left]) {
      pos = left;
    } else {
      mass -= tree_[left];
      pos = left + 1;
    }
  }
  return pos - base;
}

double ReplayBuffer::tree_total() const { return tree_[1]; }

void ReplayBuffer::push(Experience experience) {
  data_[next_] = std::move(experience);
  tree_set(next_, std::pow(max_priority_, alpha_));
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

ReplayBuffer::Draw ReplayBuffer::sample(std::size_t batch, double beta, Rng& rng) {
  if (size_ == 0) throw std::runtime_error("ReplayBuffer::sample: empty buffer");
  if (batch == 0) throw std::invalid_argument("ReplayBuffer::sample: zero batch");
  Draw draw;
  draw.indices.reserve(batch);
  draw.weights.reserve(batch);
  double total = tree_total();
  std::size_t base = tree_.size() / 2;
  double max_weight = 0.0;
  for (std::size_t k = 0; k < batch; ++k) {
    std::size_t idx = tree_find(rng.uniform() * total);
    if (idx >= size_) idx = size_ - 1;  // float-boundary guard
    double p = tree_[base + idx] / total;
    double w = std::pow(static_cast<double>(size_) * p, -beta);
    draw.indices.push_back(idx);
    draw.weights.push_back(w);
    max_weight = std::max(max_weight, w);
  }
  if (max_weight > 0.0) {
    for (double& w : draw.weights) w /= max_weight;
  }
  return draw;
}

void ReplayBuffer::update_priorities(std::span<const std::size_t> indices,
                                     std::span<const double> td_abs) {
  if (indices.size() != td_abs.size()) {
    throw std::invalid_argument("ReplayBuffer::update_priorities: size mismatch");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    double priority = std::abs(td_abs[k]) + kPriorityFloor;
    tree_set(indices[k], std::pow(priority, alpha_));
    max_priority_ = std::max(max_priority_, priority);
  }
}

double ReplayBuffer::sampling_probability(std::size_t index) const {
  if (index >= size_) {
    throw std::out_of_range("ReplayBuffer::sampling_probability: bad index");
  }
  std::size_t base = tree_.size() / 2;
  return tree_[base + index] / tree_total();
}

void Hyperparams::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("Hyperparams: gamma must be in [0, 1)");
  }
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("Hyperparams: tau must be in (0, 1]");
  }
  if (eps_start < 0.0 || eps_start > 1.0 || eps_end < 0.0 || eps_end > 1.0 ||
      eps_end > eps_start) {
    throw std::invalid_argument("Hyperparams: epsilon schedule must stay in [0, 1]");
  }
  if (eps_decay_steps < 1) {
    throw std::invalid_argument("Hyperparams: eps_decay_steps must be >= 1");
  }
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("Hyperparams: learning rate must be positive");
  }
  if (batch_size < 1) throw std::invalid_argument("Hyperparams: batch_size must be >= 1");
  if (buffer_capacity == 0) {
    throw std::invalid_argument("Hyperparams: buffer_capacity must be >= 1");
  }
  if (train_start < 1) throw std::invalid_argument("Hyperparams: train_start must be >= 1");
  if (alpha_prio < 0.0) throw std::invalid_argument("Hyperparams: alpha_prio must be >= 0");
  if (beta_start < 0.0 || beta_end < beta_start || beta_end > 1.0) {
    throw std::invalid_argument("Hyperparams: beta schedule must be within [0, 1]");
  }
  if (grad_clip_norm <= 0.0) {
    throw std::invalid_argument("Hyperparams: grad_clip_norm must be positive");
  }
  if (train_every < 1) throw std::invalid_argument("Hyperparams: train_every must be >= 1");
}

double Hyperparams::epsilon_at(int step) const {
  double frac = std::min(1.0, static_cast<double>(step) / eps_decay_steps);
  return eps_start + (eps_end - eps_start) * frac;
}

double Hyperparams::beta_at(int step, int total_steps) const {
  double frac = total_steps <= 0
                    ? 1.0
                    : std::min(1.0, static_cast<double>(step) / total_steps);
  return beta_start + (beta_end - beta_start) * frac;
}

double td_target(const QNetwork& target, const Experience& experience,
                 double gamma) {
  double y = experience.reward;
  if (!experience.done) {
    std::vector<double> q_next = target.forward(experience.next_state);
    y += gamma * *std::max_element(q_next.begin(), q_next.end());
  }
  return y;
}

double train_step(ReplayBuffer& buffer, QNetwork& online, const QNetwork& target,
                  MomentOptimizer& optimizer, const Hyperparams& hyper,
                  double beta, Rng& rng) {
  if (buffer.size() < static_cast<std::size_t>(hyper.train_start)) {
    throw std::runtime_error("train_step: buffer below train-start threshold");
  }
  ReplayBuffer::Draw draw =
      buffer.sample(static_cast<std::size_t>(hyper.batch_size), beta, rng);

  QNetwork::Batch batch;
  batch.observations.reserve(draw.indices.size());
  batch.actions.reserve(draw.indices.size());
  batch.targets.reserve(draw.indices.size());
  batch.weights = draw.weights;
  for (std::size_t idx : draw.indices) {
    const Experience& e = buffer.at(idx);
    batch.observations.push_back(e.state);
    batch.actions.push_back(e.action);
    batch.targets.push_back(td_target(target, e, hyper.gamma));
  }

  std::vector<double> gradient;
  std::vector<double> td_errors;
  double loss = online.loss_and_gradient(batch, gradient, &td_errors);
  clip_gradient_norm(gradient, hyper.grad_clip_norm);
  optimizer.step(online.params(), gradient);

  std::vector<double> td_abs(td_errors.size());
  for (std::size_t i = 0; i < td_errors.size(); ++i) td_abs[i] = std::abs(td_errors[i]);
  buffer.update_priorities(draw.indices, td_abs);
  return loss;
}

std::string_view policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kDqn:
      return "dqn";
    case PolicyKind::kStaticEqual:
      return "static-equal";
    case PolicyKind::kFairnessDriven:
      return "fairness-driven";
    case PolicyKind::kGreedyOneStep:
      return "greedy-one-step";
    case PolicyKind::kRandom:
      return "random";
    case PolicyKind::kNoCache:
      return "no-cache";
  }
  return "unknown";
}

std::optional<PolicyKind> policy_kind_from_name(std::string_view name) {
  for (PolicyKind kind :
       {PolicyKind::kDqn, PolicyKind::kStaticEqual, PolicyKind::kFairnessDriven,
        PolicyKind::kGreedyOneStep, PolicyKind::kRandom, PolicyKind::kNoCache}) {
    if (policy_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

DqnPolicy::DqnPolicy(QNetwork network, double epsilon)
    : network_(std::move(network)), epsilon_(epsilon) {}

int DqnPolicy::act(const World& world, const Observation& observation, Rng& rng) {
  (void)world;
  std::vector<double> q = network_.forward(observation);
  return select_action(q, epsilon_, rng);
}

namespace {

class StaticEqualPolicy : public Policy {
 public:
  int act(const World& world, const Observation&, Rng&) override {
    return encode_action({0, CacheOp::kNoOp}, world.config().template_count);
  }
  std::string name() const override { return "static-equal"; }
};

class NoCachePolicy : public Policy {
 public:
  int act(const World& world, const Observation&, Rng&) override {
    return encode_action({0, CacheOp::kNoOp}, world.config().template_count);
  }
  std::string name() const override { return "no-cache"; }
};

class RandomPolicy : public Policy {
 public:
  int act(const World& world, const Observation&, Rng& rng) override {
    return rng.uniform_int(world.action_count());
  }
  std::string name() const override { return "random"; }
};

class FairnessDrivenPolicy : public Policy {
 public:
  int act(const World& world, const Observation&, Rng&) override {
    int templates = world.config().template_count;
    int best_template = 0;
    double best_jfi = -1.0;
    for (int k = 0; k < templates; ++k) {
      World probe = world;  // same RNG state: all-else-equal comparison
      StepResult result =
          probe.step(encode_action({k, CacheOp::kNoOp}, templates));
      std::vector<double> utilities;
      utilities.reserve(result.metrics.users.size());
      bool any_positive = false;
      for (const UserStepRecord& rec : result.metrics.users) {
        utilities.push_back(rec.utility);
        any_positive = any_positive || rec.utility > 0.0;
      }
      double jfi = any_positive ? jain_fairness(utilities) : 0.0;
      if (jfi > best_jfi) {
        best_jfi = jfi;
        best_template = k;
      }
    }
    return encode_action({best_template, CacheOp::kNoOp}, templates);
  }
  std::string name() const override { return "fairness-driven"; }
};

class GreedyOneStepPolicy : public Policy {
 public:
  int act(const World& world, const Observation&, Rng&) override {
    int best_action = 0;
    double best_reward = 0.0;
    bool first = true;
    for (int a = 0; a < world.action_count(); ++a) {
      World probe = world;
      double r = probe.step(a).reward.total;
      if (first || r > best_reward) {
        best_reward = r;
        best_action = a;
        first = false;
      }
    }
    return best_action;
  }
  std::string name() const override { return "greedy-one-step"; }
};

}  // namespace

std::unique_ptr<Policy> make_baseline(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kStaticEqual:
      return std::make_unique<StaticEqualPolicy>();
    case PolicyKind::kFairnessDriven:
      return std::make_unique<FairnessDrivenPolicy>();
    case PolicyKind::kGreedyOneStep:
      return std::make_unique<GreedyOneStepPolicy>();
    case PolicyKind::kRandom:
      return std::make_unique<RandomPolicy>();
    case PolicyKind::kNoCache:
      return std::make_unique<NoCachePolicy>();
    case PolicyKind::kDqn:
      break;
  }
  throw std::invalid_argument("make_baseline: dqn needs a checkpoint, use DqnPolicy");
}

}  // namespace slicesim
