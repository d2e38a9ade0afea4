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
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "slicesim/content_cache.hpp"
#include "slicesim/qos.hpp"
#include "slicesim/radio.hpp"
#include "slicesim/rng.hpp"
#include "slicesim/scenario.hpp"

namespace slicesim {

/// One entry of the published allocation-template list: the fraction of a
/// BS's RBGs handed to each slice.
struct AllocationTemplate {
  std::array<double, kSliceCount> slice_fraction;
};

/// The fixed template list (K = 10). Template 0 is the canonical equal
/// split used by the static baseline.
std::span<const AllocationTemplate> allocation_templates();

/// Integer RBG counts for a template: floors, then leftovers by largest
/// fractional remainder (ties to the lower slice index).
std::array<int, kSliceCount> template_rbg_counts(const AllocationTemplate& t,
                                                 int rbg_count);

enum class CacheOp {
  kNoOp = 0,
  kCacheHottest = 1,      // admit hottest uncached content, no eviction
  kEvictThenCache = 2,    // admit hottest uncached content, LFU eviction
};

inline constexpr int kCacheOpCount = 3;

std::string_view cache_op_name(CacheOp op);

struct DecodedAction {
  int template_index = 0;
  CacheOp cache_op = CacheOp::kNoOp;
};

/// |A| = template_count * 3.
int action_count(int template_count);

/// Mixed-radix decode, index = template_index * 3 + cache_op. Bijective;
/// throws std::out_of_range outside [0, |A|).
DecodedAction decode_action(int index, int template_count);
int encode_action(const DecodedAction& action, int template_count);

using Observation = std::vector<double>;

/// Reward parts; total = utility_sum - lambda_sla * sla_penalty
/// - lambda_overflow * overflow_penalty (penalties stored unweighted).
struct RewardBreakdown {
  double utility_sum = 0.0;
  double sla_penalty = 0.0;      // violating-user fraction in [0, 1]
  double overflow_penalty = 0.0; // 1 if a cache op was rejected for overflow
  double total = 0.0;
};

struct UserStepRecord {
  int user = 0;
  Slice slice = Slice::kEmbb;
  int bs = -1;
  int rbgs = 0;
  double rate_bps = 0.0;
  double throughput_bps = 0.0;  // delivered content bits/s, min(eta, mu) * L
  DelayBreakdown delay;
  int hit = 0;
  double utility = 0.0;
  bool delay_ok = false;
  bool rate_ok = false;
  ContentId request = -1;
};

struct StepMetrics {
  int interval = 0;
  std::vector<UserStepRecord> users;
  std::vector<double> bs_occupancy_frac;
  std::vector<double> bs_occupancy_bits;
  std::vector<double> bs_hit_ratio;  // decayed running ratio
  std::vector<int> bs_requests;      // this interval, per BS
  std::vector<int> bs_hits;
  int requests = 0;                  // this interval
  int hits = 0;
  std::array<double, kSliceCount> slice_utility_mean = {0.0, 0.0, 0.0};
  double sla_violation_fraction = 0.0;
};

struct StepResult {
  Observation observation;
  RewardBreakdown reward;
  StepMetrics metrics;
  bool done = false;
};

struct EnvConfig {
  CacheGainParams gain;                // delta, kappa
  double lambda_sla = 1.0;             // lambda_1
  double lambda_overflow = 0.5;        // lambda_2
  int horizon = 200;                   // intervals per episode
  UtilityShaping shaping = UtilityShaping::kSliceMatched;
  bool caching_enabled = true;
  bool prewarm_caches = false;         // fill caches by popularity at reset
  double delay_cap_multiplier = 10.0;  // cap = multiplier * D_th on instability
  int template_count = 10;             // first K of the published list
  PathlossParams pathloss;
  double noise_dbm_per_rbg = kDefaultNoiseDbmPerRbg;
  double reference_spectral_eff = 4.0;  // b/s/Hz, load normalization only
  double counter_decay = 0.99;          // popularity counter decay per interval

  void validate() const;
};

/// The per-interval decision process. Owns a scenario copy, the caches, and
/// the named RNG sub-streams; everything is value state so a World can be
/// cloned for one-step lookahead baselines.
///
/// Step order: mobility, re-attachment, allocation decode to rates, content
/// requests + cache lookup + cache op, delays and utilities and feasibility,
/// reward, metrics. Episodes end after `horizon` intervals.
class World {
 public:
  /// Seeds the sub-streams from `seed_override` when given, otherwise from
  /// the scenario's seed.
  World(Scenario scenario, EnvConfig config,
        std::optional<std::uint64_t> seed_override = std::nullopt);

  /// Starts a new episode: repositions users, clears (and optionally
  /// prewarms) caches, resets interval bookkeeping. RNG streams keep
  /// advancing so successive episodes differ but a fixed seed reproduces
  /// the whole run.
  void reset();

  Observation observe() const;
  StepResult step(int action_index);

  int action_count() const;
  int observation_dim() const;
  int interval() const { return interval_; }

  const Scenario& scenario() const { return scenario_; }
  const EnvConfig& config() const { return config_; }
  const Catalog& catalog() const { return catalog_; }
  const std::vector<CacheState>& caches() const { return caches_; }
  CacheState& cache(int bs) { return caches_.at(bs); }

  /// Reference capacity used to normalize offered load in the observation.
  double network_reference_capacity_bps() const;

 private:
  struct BsDemand {
    std::map<ContentId, double> request_counts;  // decayed
    double decayed_requests = 0.0;
    double decayed_hits = 0.0;
  };

  struct PrevIntervalStats {
    std::array<double, kSliceCount> mean_rate_norm = {0.0, 0.0, 0.0};
    std::array<double, kSliceCount> mean_delay_norm = {0.0, 0.0, 0.0};
    std::array<double, kSliceCount> violation_frac = {0.0, 0.0, 0.0};
  };

  void prewarm();
  ContentId hottest_uncached(int bs) const;  // -1 when none
  std::vector<double> rx_power_table_mw() const;

  Scenario scenario_;
  EnvConfig config_;
  Catalog catalog_;
  SubStreams rng_;
  std::vector<CacheState> caches_;
  std::vector<BsDemand> demand_;
  PrevIntervalStats prev_;
  int interval_ = 0;
  int prev_action_ = 0;
};

}  // namespace slicesim
