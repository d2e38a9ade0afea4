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

#include "slicesim/qos.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slicesim {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

double rate_term(double rate_norm) { return kTwoOverPi * std::atan(rate_norm); }

double delay_term(double delay_norm, int hit, double kappa) {
  return 1.0 - kTwoOverPi * std::atan(delay_norm * (1.0 - kappa * hit));
}

}  // namespace

DelayBreakdown total_delay(double d_trans_s, double rate_bps,
                           double effective_packet_bits, double eta_pps,
                           double delay_cap_s) {
  if (rate_bps <= 0.0) {
    throw std::domain_error("total_delay: infeasible link (rate <= 0)");
  }
  if (effective_packet_bits <= 0.0) {
    throw std::invalid_argument("total_delay: packet size must be positive");
  }
  if (eta_pps < 0.0) {
    throw std::invalid_argument("total_delay: arrival rate must be >= 0");
  }
  DelayBreakdown d;
  d.transmission_s = d_trans_s;
  double mu = rate_bps / effective_packet_bits;  // service rate, packets/s
  if (mu > eta_pps) {
    d.queuing_s = 1.0 / (mu - eta_pps);
    d.total_s = d.transmission_s + d.queuing_s;
    d.stable = true;
  } else {
    d.queuing_s = delay_cap_s;
    d.total_s = delay_cap_s;
    d.stable = false;
  }
  return d;
}

UtilityForm utility_form(Slice s, UtilityShaping shaping) {
  switch (shaping) {
    case UtilityShaping::kUniformBalanced:
      return UtilityForm::kBalanced;
    case UtilityShaping::kLatencyFocused:
      return UtilityForm::kDelay;
    case UtilityShaping::kThroughputFocused:
      return UtilityForm::kRate;
    case UtilityShaping::kSliceMatched:
      break;
  }
  switch (s) {
    case Slice::kEmbb:
      return UtilityForm::kRate;
    case Slice::kUrllc:
      return UtilityForm::kDelay;
    case Slice::kMbrllc:
      return UtilityForm::kBalanced;
  }
  return UtilityForm::kBalanced;
}

double shaped_utility(const UtilityInputs& in, UtilityShaping shaping) {
  if (in.rate_norm < 0.0 || in.delay_norm < 0.0) {
    throw std::invalid_argument("utility: normalized rate/delay must be >= 0");
  }
  if (in.hit != 0 && in.hit != 1) {
    throw std::invalid_argument("utility: hit indicator must be 0 or 1");
  }
  if (in.kappa < 0.0 || in.kappa > 1.0) {
    throw std::invalid_argument("utility: kappa must be in [0, 1]");
  }
  switch (utility_form(in.slice, shaping)) {
    case UtilityForm::kRate:
      return rate_term(in.rate_norm);
    case UtilityForm::kDelay:
      return delay_term(in.delay_norm, in.hit, in.kappa);
    case UtilityForm::kBalanced:
      return 0.5 * (delay_term(in.delay_norm, in.hit, in.kappa) +
                    rate_term(in.rate_norm));
  }
  return 0.0;
}

double utility(const UtilityInputs& inputs) {
  return shaped_utility(inputs, UtilityShaping::kSliceMatched);
}

double objective(std::span<const double> per_user_utilities) {
  double total = 0.0;
  for (double u : per_user_utilities) total += u;
  return total;
}

SlaSatisfaction sla_satisfaction(const SlaReport& report) {
  SlaSatisfaction result;
  std::array<int, kSliceCount> counts = {0, 0, 0};
  std::array<int, kSliceCount> satisfied = {0, 0, 0};
  int total_satisfied = 0;
  for (const SlaEntry& e : report.entries) {
    int s = slice_index(e.slice);
    ++counts[s];
    if (e.delay_ok && e.rate_ok) {
      ++satisfied[s];
      ++total_satisfied;
    }
  }
  for (int s = 0; s < kSliceCount; ++s) {
    result.per_slice[s] =
        counts[s] == 0 ? 1.0 : static_cast<double>(satisfied[s]) / counts[s];
  }
  result.overall = report.entries.empty()
                       ? 1.0
                       : static_cast<double>(total_satisfied) /
                             static_cast<double>(report.entries.size());
  return result;
}

int FeasibilityResult::count(Constraint c) const {
  int n = 0;
  for (const Violation& v : violations) {
    if (v.constraint == c) ++n;
  }
  return n;
}

FeasibilityResult feasibility(const SlaReport& report,
                              std::span<const CacheState> caches) {
  FeasibilityResult result;
  for (const SlaEntry& e : report.entries) {
    if (!e.delay_ok) result.violations.push_back({Constraint::kDelay, e.user});
    if (!e.rate_ok) result.violations.push_back({Constraint::kRate, e.user});
  }
  for (const CacheState& cache : caches) {
    // (iii) is inclusive: occupancy == capacity passes.
    if (cache.occupancy_bits() > cache.capacity_bits()) {
      result.violations.push_back({Constraint::kCacheCapacity, cache.bs_id()});
    }
  }
  return result;
}

double jain_fairness(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("jain_fairness: empty input");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : xs) {
    if (x < 0.0) throw std::invalid_argument("jain_fairness: negative score");
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) throw std::invalid_argument("jain_fairness: all-zero input");
  return sum * sum / (static_cast<double>(xs.size()) * sum_sq);
}

}  // namespace slicesim
