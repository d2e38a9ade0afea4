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

#include <string>

namespace slicesim::testing {

// 1 BS x 6 users, frictionless radio conditions. For bookkeeping and
// determinism tests where physics should not get in the way.
inline const std::string kTinyScenario = R"({
  "seed": 7,
  "coverage_radius_m": 120.0,
  "catalog_size": 30,
  "base_stations": {"count": 1, "cache_capacity_bits": 6.4e7},
  "users_per_bs": {"embb": 2, "urllc": 2, "mbrllc": 2},
  "sla": {
    "embb":   {"packet_size_bits": 2.0e6, "arrival_rate_pps": 1.0,
               "delay_threshold_s": 2.0, "rate_threshold_bps": 2.0e6},
    "urllc":  {"packet_size_bits": 2.0e5, "arrival_rate_pps": 10.0,
               "delay_threshold_s": 0.25, "rate_threshold_bps": 1.0e6},
    "mbrllc": {"packet_size_bits": 2.0e6, "arrival_rate_pps": 1.0,
               "delay_threshold_s": 1.0, "rate_threshold_bps": 2.0e6}
  }
})";

// 1 BS x 3 users (one per slice), used with template_count 2 for the
// greedy-enumeration equivalence check (|A| = 6).
inline const std::string kGreedyScenario = R"({
  "seed": 5,
  "coverage_radius_m": 100.0,
  "catalog_size": 12,
  "base_stations": {"count": 1, "cache_capacity_bits": 2.0e7},
  "users_per_bs": {"embb": 1, "urllc": 1, "mbrllc": 1},
  "sla": {
    "embb":   {"packet_size_bits": 4.0e6, "arrival_rate_pps": 1.0,
               "delay_threshold_s": 1.0, "rate_threshold_bps": 4.0e6},
    "urllc":  {"packet_size_bits": 4.0e5, "arrival_rate_pps": 8.0,
               "delay_threshold_s": 0.2, "rate_threshold_bps": 1.0e6},
    "mbrllc": {"packet_size_bits": 4.0e6, "arrival_rate_pps": 1.0,
               "delay_threshold_s": 0.5, "rate_threshold_bps": 4.0e6}
  }
})";

// Desk-scale contended cell cluster: 3 BSs x 12 users. Offered load sits
// around two thirds of the interference-limited cell capacity, with SLA
// thresholds placed so well-allocated users satisfy them and starved ones
// tip into queue instability.
inline const std::string kDeskScenario = R"({
  "seed": 42,
  "coverage_radius_m": 150.0,
  "catalog_size": 60,
  "zipf_alpha": 0.8,
  "base_stations": {"count": 3, "cache_capacity_bits": 3.2e7},
  "users_per_bs": {"embb": 4, "urllc": 4, "mbrllc": 4},
  "sla": {
    "embb":   {"packet_size_bits": 4.0e6, "arrival_rate_pps": 0.4,
               "delay_threshold_s": 6.0, "rate_threshold_bps": 2.0e6},
    "urllc":  {"packet_size_bits": 1.6e6, "arrival_rate_pps": 1.0,
               "delay_threshold_s": 1.5, "rate_threshold_bps": 1.0e6},
    "mbrllc": {"packet_size_bits": 4.0e6, "arrival_rate_pps": 0.3,
               "delay_threshold_s": 4.0, "rate_threshold_bps": 2.0e6}
  }
})";

// 7-BS variant for the edge-server-density sweep (42 users total).
inline const std::string kSevenBsScenario = R"({
  "seed": 42,
  "coverage_radius_m": 150.0,
  "catalog_size": 60,
  "zipf_alpha": 0.8,
  "base_stations": {"count": 7, "cache_capacity_bits": 3.2e7},
  "users_per_bs": {"embb": 2, "urllc": 2, "mbrllc": 2},
  "sla": {
    "embb":   {"packet_size_bits": 4.0e6, "arrival_rate_pps": 0.4,
               "delay_threshold_s": 6.0, "rate_threshold_bps": 2.0e6},
    "urllc":  {"packet_size_bits": 1.6e6, "arrival_rate_pps": 1.0,
               "delay_threshold_s": 1.5, "rate_threshold_bps": 1.0e6},
    "mbrllc": {"packet_size_bits": 4.0e6, "arrival_rate_pps": 0.3,
               "delay_threshold_s": 4.0, "rate_threshold_bps": 2.0e6}
  }
})";

}  // namespace slicesim::testing
