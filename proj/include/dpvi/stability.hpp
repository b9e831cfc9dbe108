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

#include "dpvi/nispp.hpp"
#include "dpvi/nseg.hpp"

namespace dpvi {

// Coupled-trajectory laboratory: two solver runs on neighboring datasets
// share every random draw (batch indices and Gaussian noise), which realizes
// the per-trajectory drift lemmas exactly. Each pair runs from two
// independently constructed stream sets with the same seed, and equality of
// the draws is verified rather than assumed.

enum class SolverKind { kNseg, kNispp };

struct CoupledStepDiag {
  double delta = 0.0;       // ||u_t - u'_t|| after the step
  double gamma = 0.0;
  double lambda = 0.0;      // NISPP only
  int batch_size = 0;
  // NSEG: differing-point multiplicity per oracle slot (0 when the batches
  // agree on the replaced index or the replacement equals the original).
  int slot1_mult = 0, slot2_mult = 0;
  double mtilde_sum = 0.0;  // M~_1 + M~_2, measured or majorized
  bool mtilde_measured = false;
  double noise1_norm = 0.0, noise2_norm = 0.0;
  // NISPP: measured operator discrepancy a_{k+1} and the certificate values.
  double a = 0.0;
  double nu_cert = 0.0, nu_cert_prime = 0.0;
};

struct CoupledRunReport {
  SolverKind solver = SolverKind::kNseg;
  std::vector<CoupledStepDiag> steps;
  double output_distance = 0.0;
  double bound = 0.0;            // per-run lemma bound after the last step
  bool randomness_verified = false;
  int first_divergence_step = -1;  // first step whose batches differ, -1 if none
  int bound_violations = 0;        // prefix checks delta_t <= bound_t
  double max_violation = 0.0;
};

CoupledRunReport coupled_run_nseg(const ProblemInstance& inst, const Dataset& S,
                                  int i, const Datapoint& replacement,
                                  const NsegConfig& cfg,
                                  bool use_fixed_point_diagnostics = false);

CoupledRunReport coupled_run_nispp(const ProblemInstance& inst,
                                   const Dataset& S, int i,
                                   const Datapoint& replacement,
                                   const NisppConfig& cfg);

// Per-run drift bounds recomputed from recorded diagnostics.
// NSEG: sum_s ([M~1+M~2+2LD] L g_s^2 + L Delta_1 g_s^2 + Delta_2 g_s) with
// Delta_i the almost-sure majorant (2 M mult / B).
double nseg_per_run_bound(const CoupledRunReport& report,
                          const ProblemInstance& inst);
// NISPP: sum over steps from the first differing batch of
// 2 a_{k+1}/lambda_k + sqrt(4 nu_k / lambda_k), nu_k the certified values.
double nispp_per_run_bound(const CoupledRunReport& report);

// Expectation-level UAS bounds evaluated for a config.
double nseg_expectation_bound(const NsegConfig& cfg,
                              const ProblemInstance& inst, int n, int d);
double nispp_expectation_bound(const NisppConfig& cfg,
                               const ProblemInstance& inst, int n);

struct UasEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double max = 0.0;
  int trials = 0;
  int per_run_bound_violations = 0;
  double expectation_bound = 0.0;
  // NISPP high-probability regime check (max over trials vs the
  // 4MK/(lambda n) + K sqrt(4 nu/lambda) bound); skipped out of regime.
  bool hp_applicable = false;
  double hp_bound = 0.0;
  bool hp_ok = true;
};

struct UasConfig {
  std::variant<NsegConfig, NisppConfig> solver_cfg;
  bool use_fixed_point_diagnostics = false;
};

UasEstimate uas_estimate(const ProblemInstance& inst,
                         const DataDistribution& dist, int n,
                         const UasConfig& cfg, int trials, std::uint64_t seed,
                         int jobs = 1);

struct ProxSensitivityReport {
  int trials = 0;
  int violations = 0;
  double max_distance = 0.0;
  double bound = 0.0;  // 4M/(lambda B) + 2 * inner distance tolerance
};

// Neighboring-batch prox solves from a shared center w_k; distances must stay
// within the sensitivity bound plus certificate slack.
ProxSensitivityReport prox_sensitivity_check(const ProblemInstance& inst,
                                             const DataDistribution& dist,
                                             const Vector& w_k, double lambda,
                                             int B, double nu, int trials,
                                             std::uint64_t seed);

}  // namespace dpvi
