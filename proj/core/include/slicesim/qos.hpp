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
#include <span>
#include <vector>

#include "slicesim/content_cache.hpp"
#include "slicesim/slice.hpp"

namespace slicesim {

/// Per-user delay decomposition for one interval. When the queue is unstable
/// (service rate <= arrival rate) the total is pinned to the delay cap and
/// `stable` is false; otherwise total = transmission + queuing.
struct DelayBreakdown {
  double transmission_s = 0.0;
  double queuing_s = 0.0;
  double total_s = 0.0;
  bool stable = true;
};

/// Total delay: transmission delay plus the M/M/1 sojourn 1/(mu - eta) with
/// service rate mu = rate / effective_packet_bits in packets/s. A cache hit
/// shrinks the service size to delta*L, so effective_packet_bits carries that
/// already. Throws std::domain_error on non-positive rate.
DelayBreakdown total_delay(double d_trans_s, double rate_bps,
                           double effective_packet_bits, double eta_pps,
                           double delay_cap_s);

/// Which term(s) of the shared utility a slice is scored on.
enum class UtilityForm { kRate, kDelay, kBalanced };

/// Utility-shaping configurations: the slice-matched mapping (eMBB rate,
/// URLLC delay, MBRLLC both) or one form substituted for every slice.
enum class UtilityShaping {
  kSliceMatched,
  kUniformBalanced,
  kLatencyFocused,
  kThroughputFocused,
};

UtilityForm utility_form(Slice s, UtilityShaping shaping);

/// Arguments of the shared utility. Rate and delay are normalized by the
/// slice's SLA thresholds so the atan arguments are dimensionless and 0.5 is
/// the exactly-at-threshold point of the rate term.
struct UtilityInputs {
  Slice slice = Slice::kEmbb;
  double rate_norm = 0.0;   // R / R_th
  double delay_norm = 0.0;  // d / D_th
  int hit = 0;              // H in {0, 1}
  double kappa = 0.0;
};

/// Slice utility in [0, 1]:
///   rate form      (2/pi) * atan(rate_norm)
///   delay form     1 - (2/pi) * atan(delay_norm * (1 - kappa * hit))
///   balanced form  mean of the two.
double utility(const UtilityInputs& inputs);
double shaped_utility(const UtilityInputs& inputs, UtilityShaping shaping);

/// Aggregate objective: sum of per-user utilities at their serving BS.
double objective(std::span<const double> per_user_utilities);

struct SlaEntry {
  int user = 0;
  Slice slice = Slice::kEmbb;
  bool delay_ok = false;  // constraint (i): d <= D_th
  bool rate_ok = false;   // constraint (ii): R > R_th
};

struct SlaReport {
  std::vector<SlaEntry> entries;
};

struct SlaSatisfaction {
  std::array<double, kSliceCount> per_slice = {0.0, 0.0, 0.0};
  double overall = 0.0;
};

/// Fraction of users meeting both (i) and (ii), per slice and overall.
/// Slices without users report 1.0 (vacuously satisfied).
SlaSatisfaction sla_satisfaction(const SlaReport& report);

enum class Constraint {
  kDelay,           // (i)
  kRate,            // (ii)
  kCacheCapacity,   // (iii)
  kBinaryPlacement  // (iv), holds by construction of the hit indicator
};

struct Violation {
  Constraint constraint = Constraint::kDelay;
  int subject = 0;  // user id for (i)/(ii), BS id for (iii)
};

struct FeasibilityResult {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  int count(Constraint c) const;
};

/// Checks constraints (i)-(iv) and returns the violation list the reward
/// consumes. (iii) compares each cache's occupancy to its capacity; (iv) is
/// binary by type construction and can never appear in the list.
FeasibilityResult feasibility(const SlaReport& report,
                              std::span<const CacheState> caches);

/// Jain's fairness index (sum x)^2 / (n * sum x^2) over non-negative scores.
/// Throws std::invalid_argument on empty, negative, or all-zero input.
double jain_fairness(std::span<const double> xs);

}  // namespace slicesim
