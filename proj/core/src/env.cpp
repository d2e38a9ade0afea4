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

#include "slicesim/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicesim {

namespace {

constexpr std::array<AllocationTemplate, 10> kTemplates = {{
    {{0.34, 0.33, 0.33}},  // 0: equal split (static baseline)
    {{0.50, 0.25, 0.25}},
    {{0.25, 0.50, 0.25}},
    {{0.25, 0.25, 0.50}},
    {{0.60, 0.20, 0.20}},
    {{0.20, 0.60, 0.20}},
    {{0.20, 0.20, 0.60}},
    {{0.80, 0.10, 0.10}},
    {{0.10, 0.80, 0.10}},
    {{0.10, 0.10, 0.80}},
}};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::span<const AllocationTemplate> allocation_templates() { return kTemplates; }

std::array<int, kSliceCount> template_rbg_counts(const AllocationTemplate& t,
                                                 int rbg_count) {
  std::array<int, kSliceCount> counts;
  std::array<double, kSliceCount> remainders;
  int assigned = 0;
  for (int s = 0; s < kSliceCount; ++s) {
    double exact = t.slice_fraction[s] * rbg_count;
    counts[s] = static_cast<int>(std::floor(exact));
    remainders[s] = exact - counts[s];
    assigned += counts[s];
  }
  int budget = static_cast<int>(
      std::floor(rbg_count * (t.slice_fraction[0] + t.slice_fraction[1] +
                              t.slice_fraction[2]) +
                 1e-9));
  budget = std::min(budget, rbg_count);
  // Leftovers by largest fractional remainder, ties to the lower slice index.
  while (assigned < budget) {
    int best = 0;
    for (int s = 1; s < kSliceCount; ++s) {
      if (remainders[s] > remainders[best]) best = s;
    }
    counts[best] += 1;
    remainders[best] = -1.0;
    ++assigned;
  }
  return counts;
}

std::string_view cache_op_name(CacheOp op) {
  switch (op) {
    case CacheOp::kNoOp:
      return "no-op";
    case CacheOp::kCacheHottest:
      return "cache-hottest";
    case CacheOp::kEvictThenCache:
      return "evict-then-cache";
  }
  return "unknown";
}

int action_count(int template_count) {
  if (template_count < 1 ||
      template_count > static_cast<int>(kTemplates.size())) {
    throw std::invalid_argument("action_count: template_count out of range");
  }
  return template_count * kCacheOpCount;
}

DecodedAction decode_action(int index, int template_count) {
  int n = action_count(template_count);
  if (index < 0 || index >= n) {
    throw std::out_of_range("decode_action: index out of range");
  }
  return {index / kCacheOpCount, static_cast<CacheOp>(index % kCacheOpCount)};
}

int encode_action(const DecodedAction& action, int template_count) {
  if (action.template_index < 0 || action.template_index >= template_count) {
    throw std::out_of_range("encode_action: template index out of range");
  }
  return action.template_index * kCacheOpCount + static_cast<int>(action.cache_op);
}

void EnvConfig::validate() const {
  if (!(gain.delta > 0.0 && gain.delta < 1.0)) {
    throw std::invalid_argument("EnvConfig: delta must be in (0, 1)");
  }
  if (gain.kappa < 0.0 || gain.kappa > 1.0) {
    throw std::invalid_argument("EnvConfig: kappa must be in [0, 1]");
  }
  if (lambda_sla < 0.0 || lambda_overflow < 0.0) {
    throw std::invalid_argument("EnvConfig: penalty weights must be >= 0");
  }
  if (horizon < 1) throw std::invalid_argument("EnvConfig: horizon must be >= 1");
  if (delay_cap_multiplier <= 0.0) {
    throw std::invalid_argument("EnvConfig: delay_cap_multiplier must be positive");
  }
  if (template_count < 1 ||
      template_count > static_cast<int>(kTemplates.size())) {
    throw std::invalid_argument("EnvConfig: template_count out of range");
  }
  if (counter_decay <= 0.0 || counter_decay > 1.0) {
    throw std::invalid_argument("EnvConfig: counter_decay must be in (0, 1]");
  }
}

World::World(Scenario scenario, EnvConfig config,
             std::optional<std::uint64_t> seed_override)
    : scenario_(std::move(scenario)),
      config_(config),
      catalog_(Catalog::build(
          scenario_.catalog_size,
          {scenario_.sla[0].packet_size_bits, scenario_.sla[1].packet_size_bits,
           scenario_.sla[2].packet_size_bits})),
      rng_(seed_override.value_or(scenario_.seed)) {
  config_.validate();
  if (scenario_.base_stations.empty() || scenario_.users.empty()) {
    throw std::invalid_argument("World: scenario needs base stations and users");
  }
  caches_.reserve(scenario_.base_stations.size());
  for (const BaseStation& bs : scenario_.base_stations) {
    caches_.emplace_back(bs.id, bs.cache_capacity_bits);
  }
  demand_.resize(scenario_.base_stations.size());
  reset();
}

void World::reset() {
  for (UserEquipment& user : scenario_.users) {
    place_user(user, scenario_.coverage_radius_m, rng_.mobility);
    user.attached_bs = -1;
    user.pending_request = -1;
  }
  for (CacheState& cache : caches_) cache.clear();
  for (BsDemand& d : demand_) d = BsDemand{};
  prev_ = PrevIntervalStats{};
  interval_ = 0;
  prev_action_ = 0;
  if (config_.caching_enabled && config_.prewarm_caches) prewarm();
}

void World::prewarm() {
  // Fill each edge cache with the most popular content that still fits.
  for (std::size_t m = 0; m < caches_.size(); ++m) {
    if (!scenario_.base_stations[m].edge_server) continue;
    for (const ContentItem& item : catalog_.items()) {
      if (caches_[m].fits_without_eviction(item.size_bits)) {
        caches_[m].admit(item);
      }
    }
  }
}

int World::action_count() const {
  return slicesim::action_count(config_.template_count);
}

int World::observation_dim() const {
  return 13 + 2 * scenario_.bs_count();
}

double World::network_reference_capacity_bps() const {
  double total = 0.0;
  for (const BaseStation& bs : scenario_.base_stations) {
    total += bs.bandwidth_hz * config_.reference_spectral_eff;
  }
  return total;
}

Observation World::observe() const {
  int bs_count = scenario_.bs_count();
  Observation obs;
  obs.reserve(observation_dim());
  for (int s = 0; s < kSliceCount; ++s) obs.push_back(prev_.mean_rate_norm[s]);
  for (int s = 0; s < kSliceCount; ++s) obs.push_back(prev_.mean_delay_norm[s]);
  for (int s = 0; s < kSliceCount; ++s) obs.push_back(prev_.violation_frac[s]);
  for (int m = 0; m < bs_count; ++m) {
    double cap = caches_[m].capacity_bits();
    obs.push_back(cap > 0.0 ? caches_[m].occupancy_bits() / cap : 0.0);
  }
  for (int m = 0; m < bs_count; ++m) {
    const BsDemand& d = demand_[m];
    obs.push_back(d.decayed_requests > 0.0 ? d.decayed_hits / d.decayed_requests
                                           : 0.0);
  }
  double capacity = network_reference_capacity_bps();
  for (Slice s : kAllSlices) {
    double load = scenario_.slice_user_count(s) *
                  scenario_.sla_for(s).offered_load_bps();
    obs.push_back(clamp01(load / capacity));
  }
  int n_actions = action_count();
  obs.push_back(n_actions > 1
                    ? static_cast<double>(prev_action_) / (n_actions - 1)
                    : 0.0);
  return obs;
}

std::vector<double> World::rx_power_table_mw() const {
  int users = scenario_.user_count();
  int bss = scenario_.bs_count();
  std::vector<double> rx(static_cast<std::size_t>(users) * bss);
  for (int u = 0; u < users; ++u) {
    for (int m = 0; m < bss; ++m) {
      const BaseStation& bs = scenario_.base_stations[m];
      double pl = pathloss_db(distance(scenario_.users[u].position, bs.position),
                              config_.pathloss);
      rx[static_cast<std::size_t>(u) * bss + m] =
          dbm_to_mw(bs.max_tx_power_dbm - pl);
    }
  }
  return rx;
}

StepResult World::step(int action_index) {
  DecodedAction action = decode_action(action_index, config_.template_count);
  int users = scenario_.user_count();
  int bss = scenario_.bs_count();

  // (1) Mobility.
  step_mobility(scenario_, scenario_.control_interval_s, rng_.mobility);

  // (2) Link states and re-attachment. Attachment uses the single-RBG
  // reference rate, which ranks BSs identically to SINR.
  std::vector<double> rx = rx_power_table_mw();
  double noise_mw = dbm_to_mw(config_.noise_dbm_per_rbg);
  std::vector<LinkState> links(static_cast<std::size_t>(users) * bss);
  for (int u = 0; u < users; ++u) {
    double total_mw = 0.0;
    for (int m = 0; m < bss; ++m) total_mw += rx[static_cast<std::size_t>(u) * bss + m];
    for (int m = 0; m < bss; ++m) {
      std::size_t idx = static_cast<std::size_t>(u) * bss + m;
      double own = rx[idx];
      double interference = total_mw - own;  // full frequency reuse
      LinkState& link = links[idx];
      link.user = u;
      link.bs = m;
      link.pathloss_db = scenario_.base_stations[m].max_tx_power_dbm - mw_to_dbm(own);
      link.sinr_linear = own / (noise_mw + interference);
      link.rate_bps = achievable_rate_bps(
          link.sinr_linear, 1, scenario_.base_stations[m].rbg_bandwidth_hz());
    }
  }
  attach_users(scenario_, links);

  // (3) Allocation template -> per-user RBG counts -> rates. A slice's RBGs
  // at a BS are shared equally among its attached users, remainder to the
  // lowest user ids.
  const AllocationTemplate& tmpl = kTemplates[action.template_index];
  RbgAllocation allocation(users, bss);
  std::vector<double> user_rate(users, 0.0);
  std::vector<int> user_rbgs(users, 0);
  for (int m = 0; m < bss; ++m) {
    std::array<int, kSliceCount> slice_rbgs =
        template_rbg_counts(tmpl, scenario_.base_stations[m].rbg_count);
    for (int s = 0; s < kSliceCount; ++s) {
      std::vector<int> members;
      for (int u = 0; u < users; ++u) {
        if (scenario_.users[u].attached_bs == m &&
            slice_index(scenario_.users[u].slice) == s) {
          members.push_back(u);
        }
      }
      if (members.empty()) continue;
      int share = slice_rbgs[s] / static_cast<int>(members.size());
      int remainder = slice_rbgs[s] % static_cast<int>(members.size());
      for (std::size_t i = 0; i < members.size(); ++i) {
        int count = share + (static_cast<int>(i) < remainder ? 1 : 0);
        allocation.assign(members[i], m, count);
        user_rbgs[members[i]] = count;
        user_rate[members[i]] = achievable_rate_bps(
            links[static_cast<std::size_t>(members[i]) * bss + m].sinr_linear,
            count, scenario_.base_stations[m].rbg_bandwidth_hz());
      }
    }
  }
  std::vector<int> budgets = scenario_.rbg_budgets();
  if (!allocation.within_budget(budgets)) {
    throw std::logic_error("World::step: RBG budget exceeded after decode");
  }

  // (4) Content requests, cache lookups, then the cache op. Lookups happen
  // before the op, so caching pays off from the next interval on.
  StepMetrics metrics;
  metrics.interval = interval_;
  metrics.users.resize(users);
  metrics.bs_requests.assign(bss, 0);
  metrics.bs_hits.assign(bss, 0);
  std::vector<int> user_hit(users, 0);
  for (int u = 0; u < users; ++u) {
    UserEquipment& user = scenario_.users[u];
    ContentId f = sample_request(user.slice, catalog_, scenario_.zipf_alpha,
                                 rng_.traffic);
    user.pending_request = f;
    int m = user.attached_bs;
    BsDemand& demand = demand_[m];
    demand.request_counts[f] += 1.0;
    demand.decayed_requests += 1.0;
    metrics.requests += 1;
    metrics.bs_requests[m] += 1;
    int hit = 0;
    if (config_.caching_enabled && scenario_.base_stations[m].edge_server) {
      hit = caches_[m].lookup(f);
    }
    user_hit[u] = hit;
    demand.decayed_hits += hit;
    metrics.hits += hit;
    metrics.bs_hits[m] += hit;
  }

  bool overflow_rejected = false;
  if (config_.caching_enabled && action.cache_op != CacheOp::kNoOp) {
    for (int m = 0; m < bss; ++m) {
      if (!scenario_.base_stations[m].edge_server) continue;
      ContentId target = hottest_uncached(m);
      if (target < 0) continue;
      const ContentItem& item = catalog_.item(target);
      if (action.cache_op == CacheOp::kCacheHottest) {
        if (caches_[m].fits_without_eviction(item.size_bits)) {
          caches_[m].admit(item);
        } else {
          overflow_rejected = true;
        }
      } else {
        if (caches_[m].admit(item).outcome == AdmitOutcome::kRejected) {
          overflow_rejected = true;
        }
      }
    }
  }

  // (5) Delays, utilities, SLA checks.
  SlaReport report;
  report.entries.resize(users);
  std::vector<double> utilities(users, 0.0);
  std::array<double, kSliceCount> rate_norm_sum = {0.0, 0.0, 0.0};
  std::array<double, kSliceCount> delay_norm_sum = {0.0, 0.0, 0.0};
  std::array<int, kSliceCount> violations_by_slice = {0, 0, 0};
  std::array<int, kSliceCount> slice_counts = {0, 0, 0};
  std::array<double, kSliceCount> utility_sum_by_slice = {0.0, 0.0, 0.0};
  int violating_users = 0;
  for (int u = 0; u < users; ++u) {
    const UserEquipment& user = scenario_.users[u];
    const SlaProfile& sla = scenario_.sla_for(user.slice);
    int s = slice_index(user.slice);
    double cap = config_.delay_cap_multiplier * sla.delay_threshold_s;
    double rate = user_rate[u];
    int hit = user_hit[u];
    UserStepRecord& rec = metrics.users[u];
    rec.user = u;
    rec.slice = user.slice;
    rec.bs = user.attached_bs;
    rec.rbgs = user_rbgs[u];
    rec.rate_bps = rate;
    rec.hit = hit;
    rec.request = user.pending_request;
    if (rate > 0.0) {
      double effective_bits =
          hit ? config_.gain.delta * sla.packet_size_bits : sla.packet_size_bits;
      double d_trans =
          transmission_delay_s(sla.packet_size_bits, rate, hit, config_.gain.delta);
      rec.delay = total_delay(d_trans, rate, effective_bits,
                              sla.arrival_rate_pps, cap);
      double mu = rate / effective_bits;
      rec.throughput_bps = std::min(sla.arrival_rate_pps, mu) * sla.packet_size_bits;
    } else {
      // Zero-rate link: infeasible, reported at the cap.
      rec.delay = DelayBreakdown{cap, cap, cap, false};
      rec.throughput_bps = 0.0;
    }
    UtilityInputs inputs;
    inputs.slice = user.slice;
    inputs.rate_norm = rate / sla.rate_threshold_bps;
    inputs.delay_norm = rec.delay.total_s / sla.delay_threshold_s;
    inputs.hit = hit;
    inputs.kappa = config_.gain.kappa;
    rec.utility = shaped_utility(inputs, config_.shaping);
    utilities[u] = rec.utility;
    rec.delay_ok = rec.delay.total_s <= sla.delay_threshold_s;
    rec.rate_ok = rate > sla.rate_threshold_bps;
    report.entries[u] = SlaEntry{u, user.slice, rec.delay_ok, rec.rate_ok};
    if (!rec.delay_ok || !rec.rate_ok) {
      ++violating_users;
      ++violations_by_slice[s];
    }
    rate_norm_sum[s] += std::clamp(inputs.rate_norm, 0.0, 2.0) / 2.0;
    delay_norm_sum[s] += std::clamp(inputs.delay_norm, 0.0, 2.0) / 2.0;
    utility_sum_by_slice[s] += rec.utility;
    ++slice_counts[s];
  }

  // Constraint (iii) must hold in world state after every step: overflow is
  // rejected, never applied.
  FeasibilityResult feas = feasibility(report, caches_);
  if (feas.count(Constraint::kCacheCapacity) != 0) {
    throw std::logic_error("World::step: cache capacity invariant violated");
  }

  // (6) Reward.
  RewardBreakdown reward;
  reward.utility_sum = objective(utilities);
  reward.sla_penalty = static_cast<double>(violating_users) / users;
  reward.overflow_penalty = overflow_rejected ? 1.0 : 0.0;
  reward.total = reward.utility_sum - config_.lambda_sla * reward.sla_penalty -
                 config_.lambda_overflow * reward.overflow_penalty;

  // (7) Metrics and next-interval bookkeeping.
  metrics.sla_violation_fraction = reward.sla_penalty;
  metrics.bs_occupancy_frac.resize(bss);
  metrics.bs_occupancy_bits.resize(bss);
  metrics.bs_hit_ratio.resize(bss);
  for (int m = 0; m < bss; ++m) {
    double cap = caches_[m].capacity_bits();
    metrics.bs_occupancy_frac[m] =
        cap > 0.0 ? caches_[m].occupancy_bits() / cap : 0.0;
    metrics.bs_occupancy_bits[m] = caches_[m].occupancy_bits();
    const BsDemand& d = demand_[m];
    metrics.bs_hit_ratio[m] =
        d.decayed_requests > 0.0 ? d.decayed_hits / d.decayed_requests : 0.0;
  }
  for (int s = 0; s < kSliceCount; ++s) {
    int n = slice_counts[s];
    metrics.slice_utility_mean[s] = n > 0 ? utility_sum_by_slice[s] / n : 0.0;
    prev_.mean_rate_norm[s] = n > 0 ? rate_norm_sum[s] / n : 0.0;
    prev_.mean_delay_norm[s] = n > 0 ? delay_norm_sum[s] / n : 0.0;
    prev_.violation_frac[s] =
        n > 0 ? static_cast<double>(violations_by_slice[s]) / n : 0.0;
  }

  for (CacheState& cache : caches_) cache.decay_hit_counters(config_.counter_decay);
  for (BsDemand& d : demand_) {
    for (auto& [id, count] : d.request_counts) count *= config_.counter_decay;
    d.decayed_requests *= config_.counter_decay;
    d.decayed_hits *= config_.counter_decay;
  }

  prev_action_ = action_index;
  ++interval_;

  StepResult result;
  result.reward = reward;
  result.metrics = std::move(metrics);
  result.done = interval_ >= config_.horizon;
  result.observation = observe();
  return result;
}

ContentId World::hottest_uncached(int bs) const {
  const BsDemand& demand = demand_[bs];
  ContentId best = -1;
  double best_count = 0.0;
  for (const auto& [id, count] : demand.request_counts) {
    if (count <= 0.0 || caches_[bs].contains(id)) continue;
    if (count > best_count) {  // map order makes ties go to the lowest id
      best_count = count;
      best = id;
    }
  }
  return best;
}

}  // namespace slicesim
