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

#include <string>
#include <vector>

namespace dpvi {

struct PrivacyBudget {
  double eps = 0.0;
  double eta = 0.0;  // additive privacy failure parameter, in (0,1)
};

// Throws std::invalid_argument unless eps > 0 and eta in (0,1).
void validate_budget(double eps, double eta);

// Gaussian mechanism noise variance for l2-sensitivity s:
// sigma^2 = 2 s^2 ln(1/eta) / eps^2.
double gaussian_mechanism_variance(double sensitivity, double eps, double eta);

// Budget of adaptively composed mechanisms run on disjoint data blocks:
// coordinatewise maximum.
PrivacyBudget parallel_composition(const std::vector<PrivacyBudget>& budgets);

struct SubsampledSigma {
  double sigma = 0.0;  // standard deviation, not variance
  bool regime_ok = false;  // eps < c1 * K * (m/n)^2
};

// Noise scale for K adaptive steps, each on a uniformly sampled subset of
// size m out of n, with per-step sensitivity s:
// sigma = sqrt(2 K ln(1/eta)) * s * m / (n * eps).
// The regime flag reports the applicability condition; it is never enforced.
SubsampledSigma subsampled_composition_sigma(int steps, double sensitivity,
                                             int batch, int dataset_size,
                                             double eps, double eta,
                                             double c1 = 1.0);

struct CalibrationReport {
  std::string mechanism;
  double sensitivity = 0.0;
  double sigma_sq = 0.0;
  std::string composition;
  bool regime_ok = true;
  PrivacyBudget budget;
};

}  // namespace dpvi
