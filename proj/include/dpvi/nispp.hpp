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

#include <cstdint>
#include <optional>
#include <vector>

#include "dpvi/eg_operator.hpp"
#include "dpvi/nseg.hpp"
#include "dpvi/problems.hpp"

namespace dpvi {

struct NisppConfig {
  int K = 0;                      // outer loop runs k = 0..K (K+1 prox steps)
  std::vector<double> gamma;      // size K+1
  std::vector<double> lambda;     // size K+1; gamma_k lambda_k must be constant
  int batch = 1;                  // B, constant across iterations
  double nu = 0.0;                // subproblem accuracy target
  std::vector<double> sigma_sq;   // size K+1
  SamplingMode mode = SamplingMode::kWithReplacement;
  std::uint64_t seed = 0;
  std::optional<Vector> w0;       // default: projection of the origin
  int inner_cap_multiplier = 4;   // inner budget: up to this multiple of the
                                  // a-priori iteration count before failing
  bool record_iterates = false;
};

void validate_nispp_config(const ProblemInstance& inst, int n,
                           const NisppConfig& cfg);

struct ProxCertificate {
  double nu_actual = 0.0;
  int inner_iterations = 0;
};

// Raised when the inner solver exhausts its budget without certifying.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operator Extrapolation on F(z) + lambda (z - w_k), starting z0 = z1 = w_k,
// run for T_inner update steps. L is the Lipschitz constant of F.
Vector oe_solve(const OperatorFn& F, const Vector& w_k, double lambda, double L,
                const FeasibleSet& set, int T_inner);

// nu for which the certificate <F_B(u) + lambda (u - w_k), w - u> >= -nu
// holds for every feasible w; exact through support maximization.
ProxCertificate certify_prox_solution(const ProblemInstance& inst,
                                      const Dataset& data,
                                      std::span<const int> batch,
                                      const Vector& u, const Vector& w_k,
                                      double lambda, const FeasibleSet& set);

// A-priori OE update count: ceil(2 kappa ln((L D^2 + M D + 2 lambda D^2)/nu)),
// kappa = lambda/(L+lambda) + 1.
int oe_iteration_count(double L, double lambda, double M, double D, double nu);

// Certificate-driven inner solve: runs the a-priori OE update count, then
// doubles the budget up to cap_multiplier times it until the certificate
// meets nu. Throws SolverFailure when the budget is exhausted.
Vector certified_prox_solve(const ProblemInstance& inst, const Dataset& data,
                            std::span<const int> batch, const Vector& w_k,
                            double lambda, double nu, int cap_multiplier,
                            ProxCertificate& cert);

struct NisppStepInfo {
  ProxCertificate cert;
  double noise_norm = 0.0;
};

struct NisppTrajectory {
  Vector output;        // projection of the weighted average
  Vector average_raw;   // weighted average before the final projection
  Vector noise_average; // (1/Gamma) sum gamma_k xi_{k+1}
  std::vector<NisppStepInfo> steps;
  // Populated only when record_iterates is set.
  std::vector<Vector> u_hist, w_hist;
  std::vector<std::vector<int>> batches;
};

struct NisppStepDraws {
  std::vector<int> batch;
  Vector xi;
};

class NisppEngine {
 public:
  NisppEngine(const ProblemInstance& inst, const Dataset& data,
              const NisppConfig& cfg);

  void draw_step(int k, Rng& sample, Rng& noise, NisppStepDraws& out);

  // Runs prox step k (0-based): certified inner solve from the current w_k,
  // then noise addition. Returns the step certificate.
  NisppStepInfo step(int k, const NisppStepDraws& d);

  const Vector& u() const { return u_; }
  const Vector& w() const { return w_; }
  Vector average_raw() const;
  Vector noise_average() const;
  Vector output() const;

 private:
  Vector solve_prox(const std::vector<int>& batch, double lambda,
                    ProxCertificate& cert);

  const ProblemInstance& inst_;
  const Dataset& data_;
  const NisppConfig& cfg_;
  std::vector<int> pool_;  // partial Fisher-Yates pool for subset draws
  Vector u_, w_, weighted_sum_, noise_sum_, scratch_;
  double gamma_sum_ = 0.0;
};

NisppTrajectory nispp_run(const ProblemInstance& inst, const Dataset& data,
                          const NisppConfig& cfg);

// l2-sensitivity bound 4M/(lambda B); throws unless nu <= 2 M^2/(lambda B^2).
double nispp_sensitivity_bound(double M, double lambda, int B, double nu);

// sigma^2 = 32 M^2/(lambda^2 B^2) ln(1/eta)/eps^2, the Gaussian mechanism at
// sensitivity 4M/(lambda B).
double nispp_noise_variance(double M, double lambda, int B, double eps,
                            double eta);

// Disjoint single-pass schedule: B = n^{1/3}, K = floor(n/B) - 1,
// lambda_0 = max{M/D, L} max{n^{1/3}, sqrt(d ln(1/eta))/eps},
// nu = 2 M^2/(lambda_0 B^2).
NisppConfig nispp_single_pass_policy(int n, int d, double eps, double eta,
                                     double M, double L, double D);

// Sampling-with-replacement schedule: B = sqrt(n), K = n,
// lambda_0 = max{M/D, L} max{sqrt(n), sqrt(d ln(1/eta))/eps},
// nu = M^2/(lambda_0 n^2), sigma = 8M sqrt(ln(1/eta))/(B lambda_0 eps).
NisppConfig nispp_multipass_policy(int n, int d, double eps, double eta,
                                   double M, double L, double D);

// Nonprivate multipass schedule (sigma = 0, lambda_0 = max{M/D, L} sqrt(n)).
NisppConfig nispp_nonprivate_multipass_policy(int n, double M, double L,
                                              double D);

// nu + Z0(K)/Gamma_K + M sqrt(sum gamma_k^2 sigma_{k+1}^2 d)/Gamma_K with
// Z0(K) = (3 gamma_0 lambda_0/2) D^2
//       + (4M^2 + 3L^2D^2)/(gamma_0 lambda_0) sum_k gamma_k^2
//       + (5 gamma_0 lambda_0 d / 2) sum_{k>=1} sigma_{k+1}^2.
double nispp_error_bound(const NisppConfig& cfg, double M, double L, double D,
                         int d);

}  // namespace dpvi
