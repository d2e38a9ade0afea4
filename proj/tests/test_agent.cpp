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

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fixtures.hpp"
#include "gradient_check.hpp"
#include "slicesim/agent.hpp"
#include "slicesim/harness.hpp"
#include "toy_mdp.hpp"

using namespace slicesim;
using slicesim::testing::naive_forward;

TEST_CASE("zero network outputs zeros") {
  QNetwork net = QNetwork::zeros({5, 8, 4});
  std::vector<double> input = {1.0, -2.0, 0.5, 3.0, -1.0};
  for (double q : net.forward(input)) CHECK(q == 0.0);
}

TEST_CASE("single linear layer with identity weights reproduces the input") {
  QNetwork net = QNetwork::zeros({3, 3});
  // Weights row-major out x in, then biases.
  for (int o = 0; o < 3; ++o) net.params()[static_cast<std::size_t>(o) * 3 + o] = 1.0;
  std::vector<double> input = {0.3, -1.7, 2.2};
  std::vector<double> out = net.forward(input);
  REQUIRE(out.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(input[i]).epsilon(1e-15));
}

TEST_CASE("forward matches an independent re-implementation within 1e-12") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> dims = {4, 8, 3};
    QNetwork net(dims, rng);
    std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1),
                             rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::vector<double> a = net.forward(x);
    std::vector<double> b = naive_forward(dims, net.params(), x);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward rejects dimension mismatches") {
  QNetwork net = QNetwork::zeros({4, 2});
  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences") {
  // 4-8-3 network, 20 valid random trials, h = 1e-5, relative error 1e-4.
  // The finite-difference loss is evaluated with the test's own forward pass.
  double worst = testing::gradient_check_max_rel_error(20, 4242);
  CHECK(worst <= 1e-4);
}

TEST_CASE("epsilon-greedy selection") {
  Rng rng(7);
  std::vector<double> q = {1.0, 3.0, 2.0};
  CHECK(select_action(q, 0.0, rng) == 1);  // pure argmax
  std::vector<double> tie = {5.0, 5.0, 1.0};
  CHECK(select_action(tie, 0.0, rng) == 0);  // lowest-index tie-break
}

TEST_CASE("epsilon 1 explores uniformly within 3 sigma over 1e5 draws") {
  Rng rng(8);
  std::vector<double> q = {0.5, 0.2, 0.9};
  long draws = 100000;
  std::vector<long> counts(3, 0);
  for (long i = 0; i < draws; ++i) counts[select_action(q, 1.0, rng)] += 1;
  double p = 1.0 / 3.0;
  double sigma = std::sqrt(draws * p * (1 - p));
  for (long c : counts) CHECK(std::abs(c - draws * p) <= 3.0 * sigma);
}

TEST_CASE("soft update endpoints and the 0.75 recurrence") {
  QNetwork online = QNetwork::zeros({1, 1});
  QNetwork target = QNetwork::zeros({1, 1});
  for (double& p : online.params()) p = 1.0;

  SUBCASE("tau 1 copies the online net") {
    soft_update(target, online, 1.0);
    for (double p : target.params()) CHECK(p == 1.0);
  }
  SUBCASE("tau 0 leaves the target unchanged") {
    soft_update(target, online, 0.0);
    for (double p : target.params()) CHECK(p == 0.0);
  }
  SUBCASE("tau 0.5 applied twice lands on 0.75") {
    soft_update(target, online, 0.5);
    soft_update(target, online, 0.5);
    for (double p : target.params()) CHECK(p == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("architecture mismatch throws") {
    QNetwork other = QNetwork::zeros({2, 1});
    CHECK_THROWS_AS(soft_update(other, online, 0.5), std::invalid_argument);
  }
}

TEST_CASE("soft update converges geometrically to the online parameters") {
  Rng rng(9);
  QNetwork online({3, 6, 2}, rng);
  QNetwork target({3, 6, 2}, rng);
  double tau = 0.25;
  auto dist = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < online.params().size(); ++i) {
      double d = target.params()[i] - online.params()[i];
      sum += d * d;
    }
    return std::sqrt(sum);
  };
  double previous = dist();
  for (int k = 0; k < 12; ++k) {
    soft_update(target, online, tau);
    double current = dist();
    CHECK(current == doctest::Approx((1.0 - tau) * previous).epsilon(1e-9));
    previous = current;
  }
}

TEST_CASE("replay sampling is proportional to priority^alpha") {
  double alpha = 0.6;
  ReplayBuffer buffer(64, alpha);
  Rng rng(10);
  for (int i = 0; i < 50; ++i) {
    buffer.push({{static_cast<double>(i)}, 0, 0.0, {0.0}, false});
  }

  SUBCASE("uniform priorities sample uniformly within 3 sigma") {
    ReplayBuffer::Draw draw = buffer.sample(100000, 0.4, rng);
    std::vector<long> counts(50, 0);
    for (std::size_t idx : draw.indices) counts[idx] += 1;
    double p = 1.0 / 50.0;
    double sigma = std::sqrt(100000 * p * (1 - p));
    for (long c : counts) CHECK(std::abs(c - 100000 * p) <= 3.0 * sigma);
    for (double w : draw.weights) CHECK(w == doctest::Approx(1.0));
  }

  SUBCASE("a dominant priority dominates sampling as p^alpha / sum") {
    std::vector<std::size_t> indices(50);
    std::vector<double> tds(50, 0.0);
    for (std::size_t i = 0; i < 50; ++i) indices[i] = i;
    tds[7] = 10.0;
    buffer.update_priorities(indices, tds);
    // Independent expectation from the priority rule p = |td| + floor.
    double hot = std::pow(10.0 + ReplayBuffer::kPriorityFloor, alpha);
    double cold = std::pow(ReplayBuffer::kPriorityFloor, alpha);
    double expect = hot / (hot + 49.0 * cold);
    CHECK(buffer.sampling_probability(7) == doctest::Approx(expect).epsilon(1e-9));
    long draws = 100000;
    ReplayBuffer::Draw draw = buffer.sample(draws, 0.4, rng);
    long count = 0;
    for (std::size_t idx : draw.indices) count += idx == 7 ? 1 : 0;
    double sigma = std::sqrt(draws * expect * (1 - expect));
    CHECK(std::abs(count - draws * expect) <= 3.0 * sigma);
  }
}

TEST_CASE("ring buffer overwrites the oldest record at capacity") {
  ReplayBuffer buffer(4, 0.6);
  for (int i = 0; i < 6; ++i) {
    buffer.push({{static_cast<double>(i)}, i, 0.0, {0.0}, false});
  }
  CHECK(buffer.size() == 4);
  // Slots now hold 4, 5, 2, 3.
  CHECK(buffer.at(0).action == 4);
  CHECK(buffer.at(1).action == 5);
  CHECK(buffer.at(2).action == 2);
}

TEST_CASE("bootstrap targets") {
  Rng rng(11);
  QNetwork target({2, 4, 2}, rng);
  Experience terminal{{1.0, 0.0}, 0, 3.5, {0.0, 1.0}, true};
  CHECK(td_target(target, terminal, 0.9) == doctest::Approx(3.5));  // done: y = r
  Experience live{{1.0, 0.0}, 0, 1.0, {0.0, 1.0}, false};
  CHECK(td_target(target, live, 0.0) == doctest::Approx(1.0));  // myopic limit
  std::vector<double> q = target.forward(live.next_state);
  double expected = 1.0 + 0.9 * std::max(q[0], q[1]);
  CHECK(td_target(target, live, 0.9) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("train_step requires a warm buffer and returns a finite loss") {
  Hyperparams hyper;
  hyper.batch_size = 8;
  hyper.train_start = 16;
  hyper.hidden = {8};
  hyper.validate();
  Rng rng(12);
  QNetwork online({2, 8, 2}, rng);
  QNetwork target = online;
  MomentOptimizer opt(online.param_count(), hyper.learning_rate);
  ReplayBuffer buffer(64, hyper.alpha_prio);
  for (int i = 0; i < 8; ++i) {
    buffer.push({{1.0, 0.0}, i % 2, 1.0, {0.0, 1.0}, false});
  }
  CHECK_THROWS_AS(
      train_step(buffer, online, target, opt, hyper, 0.4, rng), std::runtime_error);
  for (int i = 0; i < 8; ++i) {
    buffer.push({{0.0, 1.0}, i % 2, -1.0, {1.0, 0.0}, false});
  }
  double loss = train_step(buffer, online, target, opt, hyper, 0.4, rng);
  CHECK(std::isfinite(loss));
  CHECK(loss >= 0.0);
}

TEST_CASE("gradient norm clipping") {
  std::vector<double> g = {3.0, 4.0};  // norm 5
  double norm = clip_gradient_norm(g, 10.0);
  CHECK(norm == doctest::Approx(5.0));
  CHECK(g[0] == doctest::Approx(3.0));
  norm = clip_gradient_norm(g, 1.0);
  CHECK(norm == doctest::Approx(5.0));
  CHECK(std::hypot(g[0], g[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("DQN recovers the optimal Q-values of the two-state MDP") {
  QNetwork net = testing::train_toy_mdp(99);
  auto q_star = testing::ToyMdp::optimal_q();
  for (int s = 0; s < 2; ++s) {
    std::vector<double> q = net.forward(testing::ToyMdp::encode(s));
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(q[a] - q_star[s][a]) <= 0.05);
    }
  }
}

TEST_CASE("checkpoints round-trip exactly") {
  Rng rng(13);
  QNetwork net({3, 16, 5}, rng);
  std::stringstream ss;
  net.save(ss);
  QNetwork loaded = QNetwork::load(ss);
  CHECK(loaded.layer_sizes() == net.layer_sizes());
  REQUIRE(loaded.params().size() == net.params().size());
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    CHECK(loaded.params()[i] == net.params()[i]);
  }
  std::stringstream bad("not-a-checkpoint 9");
  CHECK_THROWS_AS(QNetwork::load(bad), std::runtime_error);
}

TEST_CASE("hyperparameter validation and schedules") {
  Hyperparams h;
  h.validate();
  CHECK(h.epsilon_at(0) == doctest::Approx(1.0));
  CHECK(h.epsilon_at(h.eps_decay_steps) == doctest::Approx(h.eps_end));
  CHECK(h.epsilon_at(10 * h.eps_decay_steps) == doctest::Approx(h.eps_end));
  CHECK(h.beta_at(0, 100) == doctest::Approx(h.beta_start));
  CHECK(h.beta_at(100, 100) == doctest::Approx(h.beta_end));
  h.gamma = 1.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h.gamma = 0.99;
  h.tau = 0.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h.tau = 0.005;
  h.eps_end = 1.5;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("static-equal baseline is constant; random is seed-reproducible") {
  Scenario s = load_scenario(testing::kTinyScenario);
  EnvConfig cfg;
  World world(s, cfg, 1);
  Rng rng_a(20);
  Rng rng_b(20);
  auto static_policy = make_baseline(PolicyKind::kStaticEqual);
  Observation obs = world.observe();
  int first = static_policy->act(world, obs, rng_a);
  CHECK(first == encode_action({0, CacheOp::kNoOp}, cfg.template_count));
  world.step(first);
  CHECK(static_policy->act(world, world.observe(), rng_a) == first);

  auto random_policy = make_baseline(PolicyKind::kRandom);
  std::vector<int> seq_a, seq_b;
  for (int i = 0; i < 20; ++i) seq_a.push_back(random_policy->act(world, obs, rng_a));
  for (int i = 0; i < 20; ++i) seq_b.push_back(random_policy->act(world, obs, rng_b));
  bool varied = false;
  for (int a : seq_a) {
    CHECK(a >= 0);
    CHECK(a < world.action_count());
    varied = varied || a != seq_a[0];
  }
  CHECK(varied);
  CHECK(seq_a == seq_b);

  CHECK_THROWS_AS(make_baseline(PolicyKind::kDqn), std::invalid_argument);
}

TEST_CASE("greedy one-step baseline equals exhaustive enumeration") {
  Scenario s = load_scenario(testing::kGreedyScenario);
  EnvConfig cfg;
  cfg.template_count = 2;  // |A| = 6
  cfg.horizon = 25;
  World world(s, cfg, 31);
  Rng rng(32);
  auto greedy = make_baseline(PolicyKind::kGreedyOneStep);
  for (int t = 0; t < 25; ++t) {
    // Independent oracle: enumerate every action on a fresh clone.
    int best = 0;
    double best_reward = 0.0;
    bool first = true;
    for (int a = 0; a < world.action_count(); ++a) {
      World probe = world;
      double r = probe.step(a).reward.total;
      if (first || r > best_reward) {
        best = a;
        best_reward = r;
        first = false;
      }
    }
    int chosen = greedy->act(world, world.observe(), rng);
    CHECK(chosen == best);
    world.step(chosen);
  }
}

TEST_CASE("fairness-driven baseline maximizes one-step-ahead JFI") {
  Scenario s = load_scenario(testing::kDeskScenario);
  EnvConfig cfg;
  cfg.horizon = 10;
  World world(s, cfg, 33);
  Rng rng(34);
  auto fairness = make_baseline(PolicyKind::kFairnessDriven);
  int chosen = fairness->act(world, world.observe(), rng);
  DecodedAction decoded = decode_action(chosen, cfg.template_count);
  CHECK(decoded.cache_op == CacheOp::kNoOp);

  // Oracle: re-enumerate all templates.
  int best_template = 0;
  double best_jfi = -1.0;
  for (int k = 0; k < cfg.template_count; ++k) {
    World probe = world;
    StepResult r = probe.step(encode_action({k, CacheOp::kNoOp}, cfg.template_count));
    std::vector<double> utilities;
    for (const UserStepRecord& u : r.metrics.users) utilities.push_back(u.utility);
    double jfi = jain_fairness(utilities);
    if (jfi > best_jfi) {
      best_jfi = jfi;
      best_template = k;
    }
  }
  CHECK(decoded.template_index == best_template);
}
