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

#pragma once

#include <variant>
#include <vector>

#include "dpvi/rng.hpp"

namespace dpvi {

// Compact convex feasible sets with exact closed-form projection, support
// maximization, distance and diameter. No iterative projections anywhere.

struct Ball {
  Vector center;
  double radius = 0.0;
};

struct Box {
  Vector lower;
  Vector upper;
};

struct Simplex {
  int dim = 0;
  double scale = 1.0;  // points satisfy x >= 0, sum(x) = scale
};

class FeasibleSet;

struct ProductSet {
  std::vector<FeasibleSet> factors;
};

class FeasibleSet {
 public:
  using Variant = std::variant<Ball, Box, Simplex, ProductSet>;

  static FeasibleSet ball(Vector center, double radius);
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet simplex(int dim, double scale);
  static FeasibleSet product(std::vector<FeasibleSet> factors);

  const Variant& variant() const { return v_; }
  int dimension() const { return dim_; }

 private:
  explicit FeasibleSet(Variant v);
  Variant v_;
  int dim_ = 0;
};

struct SupportResult {
  Vector point;
  double value = 0.0;
};

// Euclidean projection onto the set. Throws std::invalid_argument on
// dimension mismatch. Idempotent and nonexpansive.
Vector project(const FeasibleSet& set, const Vector& p);

// In-place variant used on solver hot paths.
void project_in_place(const FeasibleSet& set, Vector& p);

// Maximizer and maximum of <g, w> over the set. For a ball with g = 0 the
// canonical maximizer is the center.
SupportResult support_max(const FeasibleSet& set, const Vector& g);

// Exact Euclidean diameter.
double diameter(const FeasibleSet& set);

// ||p - project(p)||; zero iff p is feasible.
double dist(const FeasibleSet& set, const Vector& p);

bool contains(const FeasibleSet& set, const Vector& p, double tol = 1e-9);

// Axis-aligned bounding box of the set, used by the grid gap oracle.
Box bounding_box(const FeasibleSet& set);

// Random feasible point (uniform per factor, Dirichlet on simplexes); test
// and diagnostic use.
Vector sample_point(const FeasibleSet& set, Rng& rng);

}  // namespace dpvi
