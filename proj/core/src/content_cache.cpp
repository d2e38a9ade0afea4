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

#include "slicesim/content_cache.hpp"

#include <cmath>
#include <stdexcept>

namespace slicesim {

Catalog Catalog::build(int catalog_size,
                       const std::array<double, kSliceCount>& slice_packet_bits) {
  if (catalog_size < 1) {
    throw std::invalid_argument("Catalog::build: catalog_size must be >= 1");
  }
  Catalog catalog;
  catalog.items_.reserve(catalog_size);
  for (int i = 0; i < catalog_size; ++i) {
    ContentItem item;
    item.id = i;
    item.popularity_rank = i + 1;
    item.slice = static_cast<Slice>(i % kSliceCount);
    item.size_bits = slice_packet_bits[slice_index(item.slice)];
    if (item.size_bits <= 0.0) {
      throw std::invalid_argument("Catalog::build: item sizes must be positive");
    }
    catalog.by_slice_[slice_index(item.slice)].push_back(item.id);
    catalog.items_.push_back(item);
  }
  return catalog;
}

Catalog Catalog::single_slice(int n, double size_bits, Slice slice) {
  if (n < 1) throw std::invalid_argument("Catalog::single_slice: n must be >= 1");
  if (size_bits <= 0.0) {
    throw std::invalid_argument("Catalog::single_slice: size must be positive");
  }
  Catalog catalog;
  catalog.items_.reserve(n);
  for (int i = 0; i < n; ++i) {
    ContentItem item{i, size_bits, i + 1, slice};
    catalog.by_slice_[slice_index(slice)].push_back(item.id);
    catalog.items_.push_back(item);
  }
  return catalog;
}

ContentId sample_zipf(std::span<const ContentId> candidates, const Catalog& catalog,
                      double alpha, Rng& rng) {
  if (candidates.empty()) {
    throw std::invalid_argument("sample_zipf: empty candidate set");
  }
  std::vector<double> weights;
  weights.reserve(candidates.size());
  for (ContentId id : candidates) {
    weights.push_back(std::pow(catalog.item(id).popularity_rank, -alpha));
  }
  return candidates[rng.categorical(weights)];
}

ContentId sample_request(Slice user_slice, const Catalog& catalog, double alpha,
                         Rng& rng) {
  const auto& candidates = catalog.items_of(user_slice);
  if (candidates.empty()) {
    throw std::invalid_argument("sample_request: catalog has no items for slice");
  }
  return sample_zipf(candidates, catalog, alpha, rng);
}

CacheState::CacheState(int bs_id, double capacity_bits)
    : bs_(bs_id), capacity_(capacity_bits) {
  if (capacity_bits < 0.0) {
    throw std::invalid_argument("CacheState: capacity must be >= 0");
  }
}

int CacheState::lookup(ContentId f) {
  auto it = cached_.find(f);
  if (it == cached_.end()) return 0;
  hits_[f] += 1.0;
  return 1;
}

AdmitResult CacheState::admit(const ContentItem& f) {
  AdmitResult result;
  if (contains(f.id)) {
    result.outcome = AdmitOutcome::kAdmitted;
    return result;
  }
  if (f.size_bits > capacity_) {
    result.outcome = AdmitOutcome::kRejected;
    return result;
  }
  while (occupancy_ + f.size_bits > capacity_) {
    // LFU victim: fewest hits, ties broken by larger size, then lower id.
    auto victim = cached_.end();
    double victim_hits = 0.0;
    for (auto it = cached_.begin(); it != cached_.end(); ++it) {
      double h = hit_count(it->first);
      bool better = false;
      if (victim == cached_.end()) {
        better = true;
      } else if (h != victim_hits) {
        better = h < victim_hits;
      } else if (it->second.size_bits != victim->second.size_bits) {
        better = it->second.size_bits > victim->second.size_bits;
      }  // map order already visits lower ids first
      if (better) {
        victim = it;
        victim_hits = h;
      }
    }
    result.evicted.push_back(victim->first);
    occupancy_ -= victim->second.size_bits;
    hits_.erase(victim->first);
    cached_.erase(victim);
  }
  cached_[f.id] = Entry{f.size_bits};
  hits_[f.id] = 0.0;
  occupancy_ += f.size_bits;
  result.outcome = result.evicted.empty() ? AdmitOutcome::kAdmitted
                                          : AdmitOutcome::kAdmittedAfterEviction;
  return result;
}

void CacheState::decay_hit_counters(double factor) {
  for (auto& [id, count] : hits_) count *= factor;
}

double CacheState::hit_count(ContentId f) const {
  auto it = hits_.find(f);
  return it == hits_.end() ? 0.0 : it->second;
}

std::vector<ContentId> CacheState::cached_ids() const {
  std::vector<ContentId> ids;
  ids.reserve(cached_.size());
  for (const auto& [id, entry] : cached_) ids.push_back(id);
  return ids;
}

void CacheState::clear() {
  cached_.clear();
  hits_.clear();
  occupancy_ = 0.0;
}

double transmission_delay_s(double packet_bits, double rate_bps, int hit,
                            double delta) {
  if (rate_bps <= 0.0) {
    throw std::domain_error("transmission_delay_s: infeasible link (rate <= 0)");
  }
  if (hit != 0 && hit != 1) {
    throw std::invalid_argument("transmission_delay_s: hit indicator must be 0 or 1");
  }
  double effective_bits = hit ? delta * packet_bits : packet_bits;
  return effective_bits / rate_bps;
}

}  // namespace slicesim
