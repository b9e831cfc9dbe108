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

#include "dpvi/eg_operator.hpp"

#include <cmath>
#include <stdexcept>

namespace dpvi {

Vector eg_iterate(const OperatorFn& F, const FeasibleSet& set, double gamma,
                  const Vector& u, int s) {
  if (gamma < 0.0) throw std::invalid_argument("eg_iterate: gamma must be >= 0");
  if (s < 0) throw std::invalid_argument("eg_iterate: s must be >= 0");
  Vector w = project(set, u);
  Vector fw(u.size());
  for (int k = 0; k < s; ++k) {
    F(w, fw);
    w = u - gamma * fw;
    project_in_place(set, w);
  }
  return w;
}

Vector eg_fixed_point(const OperatorFn& F, const FeasibleSet& set, double gamma,
                      double L, const Vector& u, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("eg_fixed_point: tol must be positive");
  const double q = gamma * L;
  if (q >= 1.0)
    throw std::invalid_argument("eg_fixed_point: requires gamma * L < 1");

  Vector w = project(set, u);
  Vector fw(u.size());
  if (q == 0.0) {
    // One application lands exactly on the fixed point.
    F(w, fw);
    Vector next = u - gamma * fw;
    project_in_place(set, next);
    return next;
  }

  // Increment threshold such that the returned point has residual <= tol:
  // ||w_{k+1} - w*|| <= q/(1-q) * ||w_{k+1} - w_k||.
  const double threshold = tol * (1.0 - q) / q;
  const long max_iters = q >= 0.99 ? 1000000L
                                   : static_cast<long>(
                                         std::ceil(std::log(threshold / 1e18) /
                                                   std::log(q))) +
                                         64;
  Vector prev = w;
  for (long k = 0; k < max_iters; ++k) {
    F(w, fw);
    Vector next = u - gamma * fw;
    project_in_place(set, next);
    const double inc = (next - w).norm();
    w = std::move(next);
    if (inc <= threshold) return w;
  }
  throw std::runtime_error("eg_fixed_point: iteration cap reached before convergence");
}

}  // namespace dpvi
