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

#include <map>
#include <span>
#include <vector>

#include "slicesim/rng.hpp"
#include "slicesim/slice.hpp"

namespace slicesim {

using ContentId = int;

struct ContentItem {
  ContentId id = 0;
  double size_bits = 0.0;
  int popularity_rank = 1;  // >= 1, unique within a catalog
  Slice slice = Slice::kEmbb;
};

/// Cache-gain parameters: delta scales the payload of a cache hit (0 < delta
/// < 1), kappa weighs the hit's delay advantage inside the utility
/// (0 <= kappa <= 1).
struct CacheGainParams {
  double delta = 0.5;
  double kappa = 0.7;
};

/// Content catalog. Items are ranked 1..N by popularity; each item belongs to
/// one slice (ranks round-robin across slices so every slice sees hot and
/// cold content) and its size is that slice's packet size.
class Catalog {
 public:
  Catalog() = default;

  static Catalog build(int catalog_size,
                       const std::array<double, kSliceCount>& slice_packet_bits);

  /// All items in one slice, ranks 1..n. Convenient for tests and single
  /// service-class setups.
  static Catalog single_slice(int n, double size_bits, Slice slice);

  const std::vector<ContentItem>& items() const { return items_; }
  const std::vector<ContentId>& items_of(Slice s) const {
    return by_slice_[slice_index(s)];
  }
  const ContentItem& item(ContentId id) const { return items_.at(id); }
  int size() const { return static_cast<int>(items_.size()); }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<ContentItem> items_;
  std::array<std::vector<ContentId>, kSliceCount> by_slice_;
};

/// Draws a content id from `candidates` with probability proportional to
/// popularity_rank^(-alpha). Throws on an empty candidate set.
ContentId sample_zipf(std::span<const ContentId> candidates, const Catalog& catalog,
                      double alpha, Rng& rng);

/// A user's request: Zipf draw over the catalog items of the user's slice.
ContentId sample_request(Slice user_slice, const Catalog& catalog, double alpha,
                         Rng& rng);

enum class AdmitOutcome { kAdmitted, kAdmittedAfterEviction, kRejected };

struct AdmitResult {
  AdmitOutcome outcome = AdmitOutcome::kRejected;
  std::vector<ContentId> evicted;  // in eviction order
};

/// Per-BS edge cache with LFU eviction. Occupancy never exceeds capacity on
/// any code path; bookkeeping always equals the sum of cached sizes.
class CacheState {
 public:
  CacheState(int bs_id, double capacity_bits);

  int bs_id() const { return bs_; }
  double capacity_bits() const { return capacity_; }
  double occupancy_bits() const { return occupancy_; }
  double free_bits() const { return capacity_ - occupancy_; }
  int item_count() const { return static_cast<int>(cached_.size()); }

  bool contains(ContentId f) const { return cached_.count(f) > 0; }
  bool fits_without_eviction(double size_bits) const {
    return size_bits <= free_bits();
  }

  /// Hit indicator: 1 iff f is cached. Bumps the hit counter on a hit;
  /// membership is never altered.
  int lookup(ContentId f);

  /// Inserts f, evicting least-frequently-used items (ties: larger size
  /// first, then lower id) until it fits. Items larger than the whole cache
  /// are rejected. Re-admitting a cached item is a no-op.
  AdmitResult admit(const ContentItem& f);

  /// Multiplies all hit counters by `factor`, applied once per control
  /// interval so popularity tracking follows request drift.
  void decay_hit_counters(double factor = 0.99);

  double hit_count(ContentId f) const;
  const std::map<ContentId, double>& hit_counters() const { return hits_; }
  std::vector<ContentId> cached_ids() const;  // ascending
  void clear();

 private:
  struct Entry {
    double size_bits = 0.0;
  };

  int bs_ = 0;
  double capacity_ = 0.0;
  double occupancy_ = 0.0;
  std::map<ContentId, Entry> cached_;
  std::map<ContentId, double> hits_;  // only for currently cached items
};

/// Cache-aware transmission delay: L/R on a miss, delta*L/R on a hit.
/// Throws std::domain_error on a non-positive rate (infeasible link; the
/// caller maps it to an SLA violation).
double transmission_delay_s(double packet_bits, double rate_bps, int hit,
                            double delta);

}  // namespace slicesim
