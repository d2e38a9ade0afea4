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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicesim/radio.hpp"
#include "slicesim/rng.hpp"
#include "slicesim/slice.hpp"

namespace slicesim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Raised by load_scenario on parse or validation failure; the message names
/// the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-slice traffic contract: packet size L, arrival rate eta, and the SLA
/// thresholds D_th / R_th.
struct SlaProfile {
  double packet_size_bits = 0.0;
  double arrival_rate_pps = 0.0;
  double delay_threshold_s = 0.0;
  double rate_threshold_bps = 0.0;

  double offered_load_bps() const { return packet_size_bits * arrival_rate_pps; }
};

struct BaseStation {
  int id = 0;
  Vec2 position;
  double bandwidth_hz = 10e6;
  int rbg_count = 50;
  double max_tx_power_dbm = 23.0;
  double cache_capacity_bits = 2e8;
  bool edge_server = true;

  double rbg_bandwidth_hz() const { return bandwidth_hz / rbg_count; }
};

struct UserEquipment {
  int id = 0;
  Slice slice = Slice::kEmbb;
  Vec2 position;
  double speed_mps = 1.0;
  Vec2 waypoint;
  int attached_bs = -1;
  int pending_request = -1;  // content id currently requested
};

/// Static world description: topology, populations, traffic profiles, and the
/// master seed every sub-stream derives from.
struct Scenario {
  std::vector<BaseStation> base_stations;
  std::vector<UserEquipment> users;
  std::array<SlaProfile, kSliceCount> sla;
  int catalog_size = 200;
  double zipf_alpha = 0.8;
  double coverage_radius_m = 150.0;
  double control_interval_s = 0.1;
  std::uint64_t seed = 1;

  const SlaProfile& sla_for(Slice s) const { return sla[slice_index(s)]; }
  int user_count() const { return static_cast<int>(users.size()); }
  int bs_count() const { return static_cast<int>(base_stations.size()); }
  int slice_user_count(Slice s) const;
  std::vector<int> rbg_budgets() const;
};

/// Mobility bounds from the pedestrian model: speeds uniform in [1, 3] m/s.
inline constexpr double kMinSpeedMps = 1.0;
inline constexpr double kMaxSpeedMps = 3.0;

/// Parses and validates a scenario config document (JSON). Unknown keys are
/// rejected; omitted optional keys take the documented defaults. Throws
/// ConfigError naming the offending key.
Scenario load_scenario(const std::string& config_text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Serializes the effective configuration back to its document form.
std::string scenario_to_config(const Scenario& scenario);

/// Uniform point in the disc of the given radius around the origin.
Vec2 random_point_in_disc(double radius_m, Rng& rng);

/// Places one user uniformly in the disc with a fresh waypoint and speed.
void place_user(UserEquipment& user, double radius_m, Rng& rng);

/// Random-waypoint step: every user advances toward its waypoint at its
/// speed; on arrival it lands on the waypoint and redraws waypoint and speed.
/// Positions never leave the coverage disc.
void step_mobility(Scenario& scenario, double dt_s, Rng& rng);

/// Attaches every user to the base station with the highest rate in
/// link_states (ties to the lowest BS id). link_states must cover all
/// (user, bs) pairs, indexed user * bs_count + bs. Returns attached BS per
/// user and updates the scenario's users.
std::vector<int> attach_users(Scenario& scenario,
                              std::span<const LinkState> link_states);

}  // namespace slicesim
