// Copyright 2026 The dpvi Authors
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

#include "dpvi/rng.hpp"

#include <cmath>
#include <doctest.h>

using namespace dpvi;

TEST_CASE("same seed reproduces the draw sequence exactly") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42), d(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.normal() == d.normal());
    CHECK(c.uniform_index(17) == d.uniform_index(17));
  }
}

TEST_CASE("derived streams are distinct and deterministic") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("uniform_index stays in range and covers small supports") {
  Rng rng(7);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto v = rng.uniform_index(5);
    REQUIRE(v < 5);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);  // ~1000 expected each
}

TEST_CASE("normal moments are sane") {
  Rng rng(11);
  const int n = 200000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    mean += x;
    m2 += x * x;
  }
  mean /= n;
  m2 /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(m2 - 1.0) < 0.02);
}

TEST_CASE("rademacher bias") {
  Rng rng(13);
  int plus = 0;
  for (int i = 0; i < 100000; ++i) plus += rng.rademacher(0.75) > 0;
  CHECK(std::abs(plus / 100000.0 - 0.75) < 0.01);
}
