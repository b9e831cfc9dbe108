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

#include "dpvi/problems.hpp"

namespace dpvi {

// Gap evaluation comes in exactly three tiers; anything outside them is
// refused rather than silently approximated.
enum class GapTier { kClosedForm, kSpSurrogate, kGrid };

std::string gap_tier_name(GapTier t);

struct GapValue {
  double value = 0.0;
  GapTier tier = GapTier::kClosedForm;
};

// Operator source: a fixed dataset (empirical gap) or the analytic
// population payload. data == nullptr selects the population.
struct GapSource {
  const Dataset* data = nullptr;
  static GapSource population() { return GapSource{nullptr}; }
  static GapSource empirical(const Dataset& d) { return GapSource{&d}; }
};

// sup_{w in W} <F(w), u - w>. Exact for constant operators; reported through
// the saddle-point gap for bilinear instances; grid oracle for other
// families with ambient dimension <= 3. Throws std::domain_error otherwise.
GapValue strong_vi_gap(const ProblemInstance& inst, const GapSource& src,
                       const Vector& u, int grid_resolution = 200);

// sup_{x', y'} f(x, y') - f(x', y); exact via support maximization.
double strong_sp_gap(const ProblemInstance& inst, const GapSource& src,
                     const Vector& x, const Vector& y);

// Strong gap of a joint point: SP gap for bilinear instances (the reported
// surrogate), VI gap otherwise.
GapValue strong_gap(const ProblemInstance& inst, const GapSource& src,
                    const Vector& point);

// Maximizes <F(w), u - w> over a projected uniform grid of the bounding box
// (`resolution` points per axis). A lower bound on the true supremum with
// error at most Lip(integrand) * spacing * sqrt(d)/2. Requires d <= 3.
double brute_force_gap_oracle(const ProblemInstance& inst, const GapSource& src,
                              const Vector& u, int resolution);
// Largest per-axis spacing of that grid.
double brute_force_grid_spacing(const ProblemInstance& inst, int resolution);

// --- Weak gap (expectation inside the supremum) -----------------------------

using SolverClosure =
    std::function<Vector(const Dataset& data, std::uint64_t seed)>;

struct WeakGapEstimate {
  double estimate = 0.0;        // population strong gap at the mean output
  double std_error = 0.0;       // jackknife over replicas
  double mean_strong_gap = 0.0; // Monte-Carlo mean of per-replica strong gaps
  Vector mean_output;
  int replicas = 0;
};

// Reduction valid because all built-in families are affine in the payload:
// the gap integrand is affine in the algorithm output, so the expectation
// over datasets can be pulled onto the output.
WeakGapEstimate weak_gap_from_outputs(const ProblemInstance& inst,
                                      const std::vector<Vector>& outputs);

WeakGapEstimate weak_gap_estimate(const ProblemInstance& inst,
                                  const DataDistribution& dist,
                                  const SolverClosure& solver, int n, int R,
                                  std::uint64_t seed, int jobs = 1);

struct GeneralizationReport {
  double weak_gap = 0.0;
  double weak_se = 0.0;
  double emp_gap_mean = 0.0;
  double emp_gap_se = 0.0;
  double delta_hat = 0.0;   // UAS estimate supplied by the caller
  double delta_se = 0.0;
  double slack = 0.0;       // rhs - lhs of the generalization inequality
  bool pass = false;
};

// Checks WeakGap <= E_S[EmpGap] + M delta + 3 * combined standard error.
GeneralizationReport generalization_check(const ProblemInstance& inst,
                                          const DataDistribution& dist,
                                          const SolverClosure& solver, int n,
                                          int R, std::uint64_t seed,
                                          double delta_hat, double delta_se,
                                          int jobs = 1);

}  // namespace dpvi
