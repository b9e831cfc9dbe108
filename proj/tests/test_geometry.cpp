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

#include "dpvi/geometry.hpp"

#include <cmath>
#include <doctest.h>

#include "test_oracles.hpp"

using namespace dpvi;
using dpvi::testing::project_oracle;
using dpvi::testing::random_set;

namespace {
Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("projection pinned examples") {
  const auto ball = FeasibleSet::ball(Vector::Zero(2), 1.0);
  CHECK((project(ball, vec2(2, 0)) - vec2(1, 0)).norm() == doctest::Approx(0.0).epsilon(1e-12));

  const auto box = FeasibleSet::box(Vector::Zero(2), Vector::Ones(2));
  CHECK((project(box, vec2(-0.5, 2)) - vec2(0, 1)).norm() == doctest::Approx(0.0).epsilon(1e-12));

  // Exhaustive active-set enumeration fixes the simplex value.
  const auto sx = FeasibleSet::simplex(3, 1.0);
  Vector p(3);
  p << 1.0, 0.5, 0.5;
  const Vector expected = project_oracle(sx, p);
  Vector pinned(3);
  pinned << 2.0 / 3, 1.0 / 6, 1.0 / 6;
  REQUIRE((expected - pinned).norm() < 1e-12);
  CHECK((project(sx, p) - pinned).norm() < 1e-12);
}

TEST_CASE("projection dimension mismatch throws") {
  const auto ball = FeasibleSet::ball(Vector::Zero(2), 1.0);
  CHECK_THROWS_AS(project(ball, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(support_max(ball, Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("invalid sets are rejected") {
  CHECK_THROWS_AS(FeasibleSet::ball(Vector::Zero(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleSet::box(Vector::Ones(2), Vector::Zero(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(FeasibleSet::simplex(3, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleSet::product({}), std::invalid_argument);
}

TEST_CASE("projection matches the active-set oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const FeasibleSet set = random_set(rng, 6);
    Vector p(set.dimension());
    for (int i = 0; i < p.size(); ++i) p[i] = rng.uniform(-3.0, 3.0);
    const Vector a = project(set, p);
    const Vector b = project_oracle(set, p);
    CHECK((a - b).norm() < 1e-9);
  }
}

TEST_CASE("projection is idempotent, nonexpansive, and optimal") {
  Rng rng(202);
  for (int trial = 0; trial < 1000; ++trial) {
    const FeasibleSet set = random_set(rng, 5);
    const int d = set.dimension();
    Vector p(d), q(d);
    for (int i = 0; i < d; ++i) {
      p[i] = rng.uniform(-3.0, 3.0);
      q[i] = rng.uniform(-3.0, 3.0);
    }
    const Vector pp = project(set, p);
    const Vector qq = project(set, q);
    CHECK((project(set, pp) - pp).norm() < 1e-12);
    CHECK((pp - qq).norm() <= (p - q).norm() + 1e-12);
    // Optimality certificate against random feasible points.
    for (int k = 0; k < 5; ++k) {
      const Vector w = sample_point(set, rng);
      CHECK((p - pp).dot(w - pp) <= 1e-9);
    }
  }
}

TEST_CASE("support_max pinned examples") {
  const auto ball = FeasibleSet::ball(Vector::Zero(2), 1.5);
  Vector g = vec2(0.6, 0.8);  // unit norm
  CHECK(support_max(ball, g).value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(support_max(ball, Vector::Zero(2)).point.norm() == 0.0);  // center

  const auto sx = FeasibleSet::simplex(2, 1.0);
  const auto r = support_max(sx, vec2(3, 5));
  CHECK(r.value == doctest::Approx(5.0));
  CHECK((r.point - vec2(0, 1)).norm() < 1e-12);

  const auto box = FeasibleSet::box(-Vector::Ones(2), Vector::Ones(2));
  const auto rb = support_max(box, vec2(2, -3));
  CHECK(rb.value == doctest::Approx(5.0));
  CHECK((rb.point - vec2(1, -1)).norm() < 1e-12);
}

TEST_CASE("support value dominates sampled inner products") {
  Rng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const FeasibleSet set = random_set(rng, 5);
    Vector g(set.dimension());
    for (int i = 0; i < g.size(); ++i) g[i] = rng.uniform(-2.0, 2.0);
    const auto r = support_max(set, g);
    CHECK(contains(set, r.point, 1e-9));
    CHECK(g.dot(r.point) == doctest::Approx(r.value).epsilon(1e-12));
    for (int k = 0; k < 20; ++k) {
      const Vector w = sample_point(set, rng);
      CHECK(g.dot(w) <= r.value + 1e-9);
    }
  }
}

TEST_CASE("diameter closed forms") {
  CHECK(diameter(FeasibleSet::ball(Vector::Zero(3), 1.0)) == doctest::Approx(2.0));
  CHECK(diameter(FeasibleSet::simplex(4, 1.0)) == doctest::Approx(std::sqrt(2.0)));
  std::vector<FeasibleSet> factors;
  factors.push_back(FeasibleSet::ball(Vector::Zero(2), 1.0));
  factors.push_back(FeasibleSet::ball(Vector::Zero(2), 1.0));
  CHECK(diameter(FeasibleSet::product(std::move(factors))) ==
        doctest::Approx(std::sqrt(8.0)));
  Vector lo(2), hi(2);
  lo << 0, 0;
  hi << 3, 4;
  CHECK(diameter(FeasibleSet::box(lo, hi)) == doctest::Approx(5.0));
}

TEST_CASE("diameter is attained between sampled points") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const FeasibleSet set = random_set(rng, 4);
    const double D = diameter(set);
    for (int k = 0; k < 30; ++k) {
      const Vector a = sample_point(set, rng);
      const Vector b = sample_point(set, rng);
      CHECK((a - b).norm() <= D + 1e-9);
    }
  }
}

TEST_CASE("dist examples and equivalence with projection") {
  const auto ball = FeasibleSet::ball(Vector::Zero(2), 1.0);
  CHECK(dist(ball, vec2(3, 0)) == doctest::Approx(2.0));
  CHECK(dist(ball, vec2(0.2, 0.1)) == doctest::Approx(0.0));
  const auto box = FeasibleSet::box(Vector::Zero(2), Vector::Ones(2));
  CHECK(dist(box, vec2(2, 2)) == doctest::Approx(std::sqrt(2.0)));

  Rng rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    const FeasibleSet set = random_set(rng, 4);
    Vector p(set.dimension());
    for (int i = 0; i < p.size(); ++i) p[i] = rng.uniform(-2.0, 2.0);
    const bool zero_dist = dist(set, p) < 1e-12;
    const bool fixed = (project(set, p) - p).norm() < 1e-12;
    CHECK(zero_dist == fixed);
  }
}
