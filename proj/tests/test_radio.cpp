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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "slicesim/radio.hpp"
#include "slicesim/rng.hpp"

using namespace slicesim;

TEST_CASE("pathloss reference distance and hand-checked value") {
  CHECK(pathloss_db(1.0) == doctest::Approx(38.0).epsilon(1e-12));
  // 38 + 30 * log10(10) = 68.
  CHECK(pathloss_db(10.0) == doctest::Approx(68.0).epsilon(1e-12));
  CHECK(pathloss_db(0.5) == pathloss_db(1.0));  // clamp below 1 m
}

TEST_CASE("pathloss is monotone nondecreasing in distance") {
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    double a = rng.uniform(0.1, 500.0);
    double b = rng.uniform(0.1, 500.0);
    if (a > b) std::swap(a, b);
    CHECK(pathloss_db(a) <= pathloss_db(b) + 1e-12);
  }
}

TEST_CASE("sinr equality and limit cases") {
  // Received power equals noise, no interference -> SINR 1.
  CHECK(sinr_linear(0.0, 0.0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Huge interference drives SINR toward zero.
  CHECK(sinr_linear(0.0, 0.0, 0.0, 1e12) < 1e-11);
}

TEST_CASE("sinr dB arithmetic cross-check") {
  // tx 23 dBm, PL 68 dB, noise -101 dBm, no interference: 10^((23-68+101)/10).
  double expected = std::pow(10.0, 5.6);
  CHECK(sinr_linear(23.0, 68.0, -101.0, 0.0) ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("achievable rate examples") {
  CHECK(achievable_rate_bps(0.0, 3, 200e3) == 0.0);      // log2(1) = 0
  CHECK(achievable_rate_bps(3.0, 1, 200e3) ==
        doctest::Approx(400e3).epsilon(1e-12));          // log2(4) = 2
  CHECK(achievable_rate_bps(1.0, 5, 200e3) ==
        doctest::Approx(1e6).epsilon(1e-12));            // 5 * 200k * log2(2)
  CHECK(achievable_rate_bps(7.3, 0, 200e3) == 0.0);      // zero RBGs
}

TEST_CASE("rate is monotone in SINR and RBGs; doubling RBGs doubles rate") {
  Rng rng(202);
  for (int i = 0; i < 200; ++i) {
    double s1 = rng.uniform(0.0, 1e4);
    double s2 = rng.uniform(0.0, 1e4);
    if (s1 > s2) std::swap(s1, s2);
    int n = 1 + rng.uniform_int(25);
    CHECK(achievable_rate_bps(s1, n, 200e3) <= achievable_rate_bps(s2, n, 200e3));
    CHECK(achievable_rate_bps(s1, n, 200e3) <=
          achievable_rate_bps(s1, n + 1, 200e3));
    CHECK(achievable_rate_bps(s1, 2 * n, 200e3) ==
          doctest::Approx(2.0 * achievable_rate_bps(s1, n, 200e3)).epsilon(1e-12));
  }
}

TEST_CASE("rbg allocation bookkeeping and budget") {
  RbgAllocation alloc(3, 2);
  alloc.assign(0, 0, 20);
  alloc.assign(1, 0, 20);
  alloc.assign(2, 1, 50);
  CHECK(alloc.used(0) == 40);
  CHECK(alloc.used(1) == 50);
  std::vector<int> budgets = {50, 50};
  CHECK(alloc.within_budget(budgets));
  alloc.assign(2, 0, 11);  // 51 at BS 0
  CHECK_FALSE(alloc.within_budget(budgets));
  alloc.assign(2, 0, 10);  // overwrite back under budget
  CHECK(alloc.used(0) == 50);
  CHECK(alloc.within_budget(budgets));
  CHECK_THROWS_AS(alloc.assign(3, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(alloc.assign(0, 0, -1), std::invalid_argument);
}
