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

#include <span>
#include <vector>

namespace slicesim {

// Log-distance pathloss. With full-frequency-reuse interference this is the
// whole channel model: no fast fading, so link quality is a deterministic
// function of geometry and the simulation stays reproducible.
struct PathlossParams {
  double ref_loss_db = 38.0;  // loss at the 1 m reference distance
  double exponent = 3.0;
};

/// PL(d) = PL0 + 10 * n * log10(d), distance clamped below 1 m.
double pathloss_db(double distance_m, const PathlossParams& params = {});

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Linear SINR: received mW over (noise mW + interference mW).
double sinr_linear(double tx_power_dbm, double pathloss_db, double noise_dbm,
                   double interference_mw);

/// Shannon rate over the assigned resource block groups:
/// R = rbgs * rbg_bandwidth * log2(1 + sinr). Zero RBGs give zero rate.
double achievable_rate_bps(double sinr_linear, int rbgs_assigned,
                           double rbg_bandwidth_hz);

// 10 MHz split into 50 RBGs.
inline constexpr double kDefaultRbgBandwidthHz = 200e3;
// Thermal noise over one 200 kHz RBG (~-120.8 dBm) plus a 7 dB noise figure.
inline constexpr double kDefaultNoiseDbmPerRbg = -113.8;

/// Channel state of one (user, base station) pair.
struct LinkState {
  int user = -1;
  int bs = -1;
  double pathloss_db = 0.0;
  double sinr_linear = 0.0;
  double rate_bps = 0.0;
};

/// Per-user RBG counts at each base station. The per-BS budget is a hard
/// invariant: enforced when an allocation is decoded and asserted every
/// interval.
class RbgAllocation {
 public:
  RbgAllocation(int user_count, int bs_count);

  void assign(int user, int bs, int count);
  int count(int user, int bs) const;
  int used(int bs) const;
  int user_count() const { return user_count_; }
  int bs_count() const { return bs_count_; }

  /// True iff every BS uses at most its budget.
  bool within_budget(std::span<const int> per_bs_budget) const;

 private:
  int user_count_ = 0;
  int bs_count_ = 0;
  std::vector<int> counts_;  // user * bs_count_ + bs
  std::vector<int> used_;    // per BS totals
};

}  // namespace slicesim
