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

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dpvi/problems.hpp"

namespace dpvi {

enum class SamplingMode { kDisjointSinglePass, kWithReplacement, kFullBatch };

std::string sampling_mode_name(SamplingMode m);
SamplingMode sampling_mode_from_name(const std::string& name);

struct NsegConfig {
  int T = 0;
  std::vector<double> gamma;      // size T
  std::vector<int> batch_size;    // size T (ignored in full-batch mode)
  std::vector<double> sigma_sq;   // size T, per-slot noise variance
  SamplingMode mode = SamplingMode::kFullBatch;
  std::uint64_t seed = 0;
  std::optional<Vector> u0;       // default: projection of the origin
  bool record_iterates = false;
};

// Throws std::invalid_argument / std::domain_error on an invalid schedule:
// T < 1, size mismatches, gamma_t above the 1/(sqrt(3) L) cap, or a
// single-pass schedule needing more than n points (2 * sum B_t <= n).
void validate_nseg_config(const ProblemInstance& inst, int n,
                          const NsegConfig& cfg);

struct NsegStepDraws {
  std::vector<int> batch1, batch2;
  Vector xi1, xi2;
};

struct NsegTrajectory {
  Vector output;      // gamma-weighted average of the w_t (last w if sum gamma = 0)
  double gamma_sum = 0.0;
  // Populated only when record_iterates is set.
  std::vector<Vector> u_hist, w_hist;
  std::vector<NsegStepDraws> draws;
};

// One Algorithm-step engine; exposed so coupled stability runs can drive two
// trajectories in lockstep on shared draws.
class NsegEngine {
 public:
  NsegEngine(const ProblemInstance& inst, const Dataset& data,
             const NsegConfig& cfg);

  // Draws batch indices and noise for step t (1-based) from the three
  // streams. Pure function of the streams; independent of the data.
  void draw_step(int t, Rng& sample, Rng& noise1, Rng& noise2,
                 NsegStepDraws& out) const;

  // Applies step t. After the call u() and w() hold u_t and w_t.
  void step(int t, const NsegStepDraws& d);

  const Vector& u() const { return u_; }
  const Vector& w() const { return w_; }
  Vector output() const;

 private:
  const ProblemInstance& inst_;
  const Dataset& data_;
  const NsegConfig& cfg_;
  std::vector<int> full_batch_;
  std::vector<long> slice_offset_;  // single-pass batch offsets
  Vector u_, w_, f_, scratch_, weighted_sum_;
  double gamma_sum_ = 0.0;
};

NsegTrajectory nseg_run(const ProblemInstance& inst, const Dataset& data,
                        const NsegConfig& cfg);

// Per-step noise variance making one batch-mean release (eps, eta)-private:
// sigma^2 = (8 M^2 / B^2) ln(1/eta) / eps^2.
double nseg_noise_variance(double M, int B, double eps, double eta);

// Disjoint single-pass schedule: B = min{sqrt(d ln(1/eta))/eps, n},
// T = floor(n / 2B), constant stepsize from the convergence bound, clipped
// to the 1/(sqrt(3) L) cap when necessary.
NsegConfig nseg_single_pass_policy(int n, int d, double eps, double eta,
                                   double M, double L, double D);

// Sampled-with-replacement schedule: batch 1 per oracle slot, T = n^2,
// gamma = min{D/M, 1/L} / (n max{sqrt(n), sqrt(d ln(1/eta))/eps}),
// sigma^2 = 8 M^2 ln(1/eta)/eps^2.
NsegConfig nseg_multipass_policy(int n, int d, double eps, double eta,
                                 double M, double L, double D);

// Nonprivate variant of the multipass schedule (sigma = 0).
NsegConfig nseg_nonprivate_multipass_policy(int n, double M, double L,
                                            double D);

// Convergence bound (D^2 + 7 sum gamma_t^2 [M^2/2 + d sigma_t^2]) / sum gamma_t.
double nseg_error_bound(const NsegConfig& cfg, double M, double L, double D,
                        int d);

}  // namespace dpvi
