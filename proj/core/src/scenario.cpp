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

#include "slicesim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace slicesim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw ConfigError("scenario config: " + message);
}

std::string joined(const std::string& scope, const std::string& key) {
  return scope.empty() ? key : scope + "." + key;
}

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      fail("unknown key `" + joined(scope, it.key()) + "`");
    }
  }
}

double get_double(const json& obj, const std::string& scope, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail("`" + joined(scope, key) + "` must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& scope, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail("`" + joined(scope, key) + "` must be an integer");
  return v.get<int>();
}

void require_positive(double value, const std::string& path) {
  if (!(value > 0.0)) fail("`" + path + "` must be positive");
}

SlaProfile parse_sla_profile(const json& obj, const std::string& scope,
                             const SlaProfile& defaults) {
  check_keys(obj, scope,
             {"packet_size_bits", "arrival_rate_pps", "delay_threshold_s",
              "rate_threshold_bps"});
  SlaProfile p;
  p.packet_size_bits = get_double(obj, scope, "packet_size_bits", defaults.packet_size_bits);
  p.arrival_rate_pps = get_double(obj, scope, "arrival_rate_pps", defaults.arrival_rate_pps);
  p.delay_threshold_s = get_double(obj, scope, "delay_threshold_s", defaults.delay_threshold_s);
  p.rate_threshold_bps = get_double(obj, scope, "rate_threshold_bps", defaults.rate_threshold_bps);
  require_positive(p.packet_size_bits, joined(scope, "packet_size_bits"));
  require_positive(p.arrival_rate_pps, joined(scope, "arrival_rate_pps"));
  require_positive(p.delay_threshold_s, joined(scope, "delay_threshold_s"));
  require_positive(p.rate_threshold_bps, joined(scope, "rate_threshold_bps"));
  return p;
}

// Traffic per the reference setup: URLLC 200 KB at 10 pkt/s, eMBB and MBRLLC
// 2 MB at 30 pkt/s (decimal units). Thresholds are documented defaults.
std::array<SlaProfile, kSliceCount> default_sla() {
  std::array<SlaProfile, kSliceCount> sla;
  sla[slice_index(Slice::kEmbb)] = {1.6e7, 30.0, 0.050, 1e7};
  sla[slice_index(Slice::kUrllc)] = {1.6e6, 10.0, 0.010, 1e6};
  sla[slice_index(Slice::kMbrllc)] = {1.6e7, 30.0, 0.010, 1e7};
  return sla;
}

// BS 0 at the origin, the rest evenly spaced on a ring at 60% of the
// coverage radius.
std::vector<Vec2> auto_layout(int count, double radius_m) {
  std::vector<Vec2> positions;
  positions.reserve(count);
  positions.push_back({0.0, 0.0});
  double ring = 0.6 * radius_m;
  for (int i = 1; i < count; ++i) {
    double angle = 2.0 * std::numbers::pi * (i - 1) / (count - 1);
    positions.push_back({ring * std::cos(angle), ring * std::sin(angle)});
  }
  return positions;
}

}  // namespace

int Scenario::slice_user_count(Slice s) const {
  int n = 0;
  for (const auto& u : users) {
    if (u.slice == s) ++n;
  }
  return n;
}

std::vector<int> Scenario::rbg_budgets() const {
  std::vector<int> budgets;
  budgets.reserve(base_stations.size());
  for (const auto& bs : base_stations) budgets.push_back(bs.rbg_count);
  return budgets;
}

Scenario load_scenario(const std::string& config_text) {
  json root;
  try {
    root = json::parse(config_text);
  } catch (const json::parse_error& e) {
    fail(std::string("parse failure: ") + e.what());
  }
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "",
             {"seed", "coverage_radius_m", "control_interval_s", "catalog_size",
              "zipf_alpha", "base_stations", "users_per_bs", "sla"});

  Scenario scenario;
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_integer()) fail("`seed` must be an integer");
    scenario.seed = v.get<std::uint64_t>();
  }
  scenario.coverage_radius_m = get_double(root, "", "coverage_radius_m", 150.0);
  require_positive(scenario.coverage_radius_m, "coverage_radius_m");
  scenario.control_interval_s = get_double(root, "", "control_interval_s", 0.1);
  require_positive(scenario.control_interval_s, "control_interval_s");
  scenario.catalog_size = get_int(root, "", "catalog_size", 200);
  if (scenario.catalog_size < 1) fail("`catalog_size` must be >= 1");
  scenario.zipf_alpha = get_double(root, "", "zipf_alpha", 0.8);
  if (scenario.zipf_alpha < 0.0) fail("`zipf_alpha` must be >= 0");

  // Base stations.
  int count = 7;
  double bandwidth_hz = 10e6;
  int rbg_count = 50;
  double max_tx_power_dbm = 23.0;
  double cache_capacity_bits = 2e8;
  int edge_servers = -1;  // default: all
  std::vector<Vec2> positions;
  if (root.contains("base_stations")) {
    const json& bs = root.at("base_stations");
    if (!bs.is_object()) fail("`base_stations` must be an object");
    check_keys(bs, "base_stations",
               {"count", "bandwidth_hz", "rbg_count", "max_tx_power_dbm",
                "cache_capacity_bits", "edge_servers", "positions"});
    count = get_int(bs, "base_stations", "count", 7);
    bandwidth_hz = get_double(bs, "base_stations", "bandwidth_hz", 10e6);
    rbg_count = get_int(bs, "base_stations", "rbg_count", 50);
    max_tx_power_dbm = get_double(bs, "base_stations", "max_tx_power_dbm", 23.0);
    cache_capacity_bits = get_double(bs, "base_stations", "cache_capacity_bits", 2e8);
    edge_servers = get_int(bs, "base_stations", "edge_servers", -1);
    if (bs.contains("positions")) {
      const json& pos = bs.at("positions");
      if (!pos.is_array()) fail("`base_stations.positions` must be an array");
      for (const json& p : pos) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          fail("`base_stations.positions` entries must be [x, y] pairs");
        }
        positions.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      if (bs.contains("count") && static_cast<int>(positions.size()) != count) {
        fail("`base_stations.positions` length must match `base_stations.count`");
      }
      count = static_cast<int>(positions.size());
    }
  }
  if (count < 1) fail("`base_stations` must define at least one base station");
  require_positive(bandwidth_hz, "base_stations.bandwidth_hz");
  if (rbg_count < 1) fail("`base_stations.rbg_count` must be >= 1");
  if (cache_capacity_bits < 0.0) fail("`base_stations.cache_capacity_bits` must be >= 0");
  if (edge_servers < 0) edge_servers = count;
  if (edge_servers > count) fail("`base_stations.edge_servers` must be <= count");
  if (positions.empty()) positions = auto_layout(count, scenario.coverage_radius_m);

  scenario.base_stations.reserve(count);
  for (int m = 0; m < count; ++m) {
    BaseStation b;
    b.id = m;
    b.position = positions[m];
    b.bandwidth_hz = bandwidth_hz;
    b.rbg_count = rbg_count;
    b.max_tx_power_dbm = max_tx_power_dbm;
    b.cache_capacity_bits = cache_capacity_bits;
    b.edge_server = m < edge_servers;
    scenario.base_stations.push_back(b);
  }

  // Users per BS, default 14 per slice (42 total each).
  std::array<int, kSliceCount> per_bs = {14, 14, 14};
  if (root.contains("users_per_bs")) {
    const json& u = root.at("users_per_bs");
    if (!u.is_object()) fail("`users_per_bs` must be an object");
    check_keys(u, "users_per_bs", {"embb", "urllc", "mbrllc"});
    for (Slice s : kAllSlices) {
      per_bs[slice_index(s)] =
          get_int(u, "users_per_bs", slice_name(s).data(), per_bs[slice_index(s)]);
      if (per_bs[slice_index(s)] < 0) {
        fail("`users_per_bs." + std::string(slice_name(s)) + "` must be >= 0");
      }
    }
  }
  if (per_bs[0] + per_bs[1] + per_bs[2] < 1) {
    fail("`users_per_bs` must define at least one user");
  }

  scenario.sla = default_sla();
  if (root.contains("sla")) {
    const json& sla = root.at("sla");
    if (!sla.is_object()) fail("`sla` must be an object");
    check_keys(sla, "sla", {"embb", "urllc", "mbrllc"});
    for (Slice s : kAllSlices) {
      if (sla.contains(slice_name(s).data())) {
        scenario.sla[slice_index(s)] = parse_sla_profile(
            sla.at(slice_name(s).data()), "sla." + std::string(slice_name(s)),
            scenario.sla[slice_index(s)]);
      }
    }
  }

  // Deterministic initial placement from the master seed.
  Rng placement(substream_seed(scenario.seed, "placement"));
  int next_id = 0;
  for (int m = 0; m < count; ++m) {
    for (Slice s : kAllSlices) {
      for (int i = 0; i < per_bs[slice_index(s)]; ++i) {
        UserEquipment user;
        user.id = next_id++;
        user.slice = s;
        place_user(user, scenario.coverage_radius_m, placement);
        scenario.users.push_back(user);
      }
    }
  }
  return scenario;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("scenario config: cannot open file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

std::string scenario_to_config(const Scenario& scenario) {
  json root;
  root["seed"] = scenario.seed;
  root["coverage_radius_m"] = scenario.coverage_radius_m;
  root["control_interval_s"] = scenario.control_interval_s;
  root["catalog_size"] = scenario.catalog_size;
  root["zipf_alpha"] = scenario.zipf_alpha;

  const BaseStation& first = scenario.base_stations.front();
  json bs;
  bs["count"] = scenario.bs_count();
  bs["bandwidth_hz"] = first.bandwidth_hz;
  bs["rbg_count"] = first.rbg_count;
  bs["max_tx_power_dbm"] = first.max_tx_power_dbm;
  bs["cache_capacity_bits"] = first.cache_capacity_bits;
  int edge = 0;
  for (const auto& b : scenario.base_stations) edge += b.edge_server ? 1 : 0;
  bs["edge_servers"] = edge;
  json positions = json::array();
  for (const auto& b : scenario.base_stations) {
    positions.push_back({b.position.x, b.position.y});
  }
  bs["positions"] = positions;
  root["base_stations"] = bs;

  // Per-BS counts as produced by the loader (uniform across BSs).
  json users;
  for (Slice s : kAllSlices) {
    users[std::string(slice_name(s))] =
        scenario.slice_user_count(s) / scenario.bs_count();
  }
  root["users_per_bs"] = users;

  json sla;
  for (Slice s : kAllSlices) {
    const SlaProfile& p = scenario.sla_for(s);
    json entry;
    entry["packet_size_bits"] = p.packet_size_bits;
    entry["arrival_rate_pps"] = p.arrival_rate_pps;
    entry["delay_threshold_s"] = p.delay_threshold_s;
    entry["rate_threshold_bps"] = p.rate_threshold_bps;
    sla[std::string(slice_name(s))] = entry;
  }
  root["sla"] = sla;
  return root.dump(2);
}

Vec2 random_point_in_disc(double radius_m, Rng& rng) {
  double r = radius_m * std::sqrt(rng.uniform());
  double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

void place_user(UserEquipment& user, double radius_m, Rng& rng) {
  user.position = random_point_in_disc(radius_m, rng);
  user.waypoint = random_point_in_disc(radius_m, rng);
  user.speed_mps = rng.uniform(kMinSpeedMps, kMaxSpeedMps);
}

void step_mobility(Scenario& scenario, double dt_s, Rng& rng) {
  if (dt_s <= 0.0) throw std::invalid_argument("step_mobility: dt must be positive");
  for (auto& user : scenario.users) {
    double dx = user.waypoint.x - user.position.x;
    double dy = user.waypoint.y - user.position.y;
    double dist = std::hypot(dx, dy);
    double reach = user.speed_mps * dt_s;
    if (dist <= reach) {
      // Arrival: land on the waypoint, then redraw destination and speed.
      user.position = user.waypoint;
      user.waypoint = random_point_in_disc(scenario.coverage_radius_m, rng);
      user.speed_mps = rng.uniform(kMinSpeedMps, kMaxSpeedMps);
    } else {
      user.position.x += dx / dist * reach;
      user.position.y += dy / dist * reach;
    }
  }
}

std::vector<int> attach_users(Scenario& scenario,
                              std::span<const LinkState> link_states) {
  int bs_count = scenario.bs_count();
  int user_count = scenario.user_count();
  if (static_cast<int>(link_states.size()) != user_count * bs_count) {
    throw std::invalid_argument("attach_users: link states must cover all (user, bs) pairs");
  }
  std::vector<int> attached(user_count, 0);
  for (int u = 0; u < user_count; ++u) {
    int best = 0;
    double best_rate = link_states[static_cast<std::size_t>(u) * bs_count].rate_bps;
    for (int m = 1; m < bs_count; ++m) {
      double rate = link_states[static_cast<std::size_t>(u) * bs_count + m].rate_bps;
      if (rate > best_rate) {  // ties keep the lowest BS id
        best_rate = rate;
        best = m;
      }
    }
    attached[u] = best;
    scenario.users[u].attached_bs = best;
  }
  return attached;
}

}  // namespace slicesim
