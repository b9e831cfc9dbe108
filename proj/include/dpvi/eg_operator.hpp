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

#include <functional>

#include "dpvi/geometry.hpp"

namespace dpvi {

// Monotone operator as a callable; diagnostic paths only, solvers evaluate
// problem families directly.
using OperatorFn = std::function<void(const Vector&, Vector&)>;

// s-step projected operator recursion: starts at the projection of u and
// applies w <- project(u - gamma * F(w)) s times.
Vector eg_iterate(const OperatorFn& F, const FeasibleSet& set, double gamma,
                  const Vector& u, int s);

// Fixed point v = project(u - gamma * F(v)). Requires gamma * L < 1. The
// stopping rule converts the step increment into a residual guarantee
// ||v - project(u - gamma F(v))|| <= tol via the contraction factor.
// Iteration cap of 1e6 applies when gamma * L >= 0.99; hitting any cap throws.
Vector eg_fixed_point(const OperatorFn& F, const FeasibleSet& set, double gamma,
                      double L, const Vector& u, double tol = 1e-10);

}  // namespace dpvi
