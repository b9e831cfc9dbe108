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

#include "dpvi/privacy.hpp"

#include <cmath>
#include <stdexcept>

namespace dpvi {

void validate_budget(double eps, double eta) {
  if (!(eps > 0.0)) throw std::invalid_argument("privacy budget: eps must be positive");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("privacy budget: eta must lie in (0,1)");
}

double gaussian_mechanism_variance(double sensitivity, double eps, double eta) {
  validate_budget(eps, eta);
  if (sensitivity < 0.0)
    throw std::invalid_argument("gaussian mechanism: sensitivity must be >= 0");
  return 2.0 * sensitivity * sensitivity * std::log(1.0 / eta) / (eps * eps);
}

PrivacyBudget parallel_composition(const std::vector<PrivacyBudget>& budgets) {
  if (budgets.empty())
    throw std::invalid_argument("parallel_composition: empty budget list");
  PrivacyBudget out{0.0, 0.0};
  for (const auto& b : budgets) {
    validate_budget(b.eps, b.eta);
    out.eps = std::max(out.eps, b.eps);
    out.eta = std::max(out.eta, b.eta);
  }
  return out;
}

SubsampledSigma subsampled_composition_sigma(int steps, double sensitivity,
                                             int batch, int dataset_size,
                                             double eps, double eta,
                                             double c1) {
  validate_budget(eps, eta);
  if (steps < 1) throw std::invalid_argument("subsampled composition: steps must be >= 1");
  if (batch < 1 || batch > dataset_size)
    throw std::invalid_argument("subsampled composition: need 1 <= m <= n");
  if (sensitivity < 0.0)
    throw std::invalid_argument("subsampled composition: sensitivity must be >= 0");
  const double ratio = static_cast<double>(batch) / dataset_size;
  SubsampledSigma out;
  out.sigma = std::sqrt(2.0 * steps * std::log(1.0 / eta)) * sensitivity *
              ratio / eps;
  out.regime_ok = eps < c1 * steps * ratio * ratio;
  return out;
}

}  // namespace dpvi
