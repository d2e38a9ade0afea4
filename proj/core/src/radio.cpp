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

#include "slicesim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicesim {

double pathloss_db(double distance_m, const PathlossParams& params) {
  double d = std::max(distance_m, 1.0);
  return params.ref_loss_db + 10.0 * params.exponent * std::log10(d);
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double sinr_linear(double tx_power_dbm, double pathloss_db, double noise_dbm,
                   double interference_mw) {
  double rx_mw = dbm_to_mw(tx_power_dbm - pathloss_db);
  double denom_mw = dbm_to_mw(noise_dbm) + interference_mw;
  return rx_mw / denom_mw;
}

double achievable_rate_bps(double sinr_linear, int rbgs_assigned,
                           double rbg_bandwidth_hz) {
  if (rbgs_assigned < 0) {
    throw std::invalid_argument("achievable_rate_bps: negative RBG count");
  }
  if (rbgs_assigned == 0) return 0.0;
  return rbgs_assigned * rbg_bandwidth_hz * std::log2(1.0 + sinr_linear);
}

RbgAllocation::RbgAllocation(int user_count, int bs_count)
    : user_count_(user_count),
      bs_count_(bs_count),
      counts_(static_cast<std::size_t>(user_count) * bs_count, 0),
      used_(bs_count, 0) {
  if (user_count < 0 || bs_count <= 0) {
    throw std::invalid_argument("RbgAllocation: invalid dimensions");
  }
}

void RbgAllocation::assign(int user, int bs, int count) {
  if (user < 0 || user >= user_count_ || bs < 0 || bs >= bs_count_) {
    throw std::out_of_range("RbgAllocation::assign: index out of range");
  }
  if (count < 0) {
    throw std::invalid_argument("RbgAllocation::assign: negative count");
  }
  int& slot = counts_[static_cast<std::size_t>(user) * bs_count_ + bs];
  used_[bs] += count - slot;
  slot = count;
}

int RbgAllocation::count(int user, int bs) const {
  if (user < 0 || user >= user_count_ || bs < 0 || bs >= bs_count_) {
    throw std::out_of_range("RbgAllocation::count: index out of range");
  }
  return counts_[static_cast<std::size_t>(user) * bs_count_ + bs];
}

int RbgAllocation::used(int bs) const {
  if (bs < 0 || bs >= bs_count_) {
    throw std::out_of_range("RbgAllocation::used: index out of range");
  }
  return used_[bs];
}

bool RbgAllocation::within_budget(std::span<const int> per_bs_budget) const {
  if (static_cast<int>(per_bs_budget.size()) != bs_count_) {
    throw std::invalid_argument("RbgAllocation::within_budget: budget size mismatch");
  }
  for (int m = 0; m < bs_count_; ++m) {
    if (used_[m] > per_bs_budget[m]) return false;
  }
  return true;
}

}  // namespace slicesim
