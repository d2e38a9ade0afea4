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
#include <optional>
#include <string_view>

namespace slicesim {

/// The three service classes every user belongs to exactly one of.
enum class Slice { kEmbb = 0, kUrllc = 1, kMbrllc = 2 };

inline constexpr int kSliceCount = 3;

inline constexpr std::array<Slice, kSliceCount> kAllSlices = {
    Slice::kEmbb, Slice::kUrllc, Slice::kMbrllc};

constexpr int slice_index(Slice s) { return static_cast<int>(s); }

constexpr std::string_view slice_name(Slice s) {
  switch (s) {
    case Slice::kEmbb:
      return "embb";
    case Slice::kUrllc:
      return "urllc";
    case Slice::kMbrllc:
      return "mbrllc";
  }
  return "unknown";
}

inline std::optional<Slice> slice_from_name(std::string_view name) {
  for (Slice s : kAllSlices) {
    if (slice_name(s) == name) return s;
  }
  return std::nullopt;
}

}  // namespace slicesim
