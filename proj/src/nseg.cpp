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

#include "dpvi/nseg.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "dpvi/privacy.hpp"

namespace dpvi {

namespace {
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kNoiseStream1 = 2;
constexpr std::uint64_t kNoiseStream2 = 3;

double stepsize_cap(double L) {
  return L > 0.0 ? 1.0 / (std::sqrt(3.0) * L)
                 : std::numeric_limits<double>::infinity();
}
}  // namespace

std::string sampling_mode_name(SamplingMode m) {
  switch (m) {
    case SamplingMode::kDisjointSinglePass: return "disjoint_single_pass";
    case SamplingMode::kWithReplacement: return "with_replacement";
    case SamplingMode::kFullBatch: return "full_batch";
  }
  return "unknown";
}

SamplingMode sampling_mode_from_name(const std::string& name) {
  if (name == "disjoint_single_pass") return SamplingMode::kDisjointSinglePass;
  if (name == "with_replacement") return SamplingMode::kWithReplacement;
  if (name == "full_batch") return SamplingMode::kFullBatch;
  throw std::invalid_argument("unknown sampling mode: " + name);
}

void validate_nseg_config(const ProblemInstance& inst, int n,
                          const NsegConfig& cfg) {
  if (cfg.T < 1) throw std::invalid_argument("nseg: T must be >= 1");
  if (static_cast<int>(cfg.gamma.size()) != cfg.T ||
      static_cast<int>(cfg.sigma_sq.size()) != cfg.T)
    throw std::invalid_argument("nseg: schedule lengths must equal T");
  if (cfg.mode != SamplingMode::kFullBatch &&
      static_cast<int>(cfg.batch_size.size()) != cfg.T)
    throw std::invalid_argument("nseg: batch schedule length must equal T");
  const double cap = stepsize_cap(inst.L);
  long used = 0;
  for (int t = 0; t < cfg.T; ++t) {
    if (cfg.gamma[t] < 0.0) throw std::invalid_argument("nseg: negative stepsize");
    if (cfg.gamma[t] > cap * (1.0 + 1e-12))
      throw std::domain_error("nseg: stepsize exceeds 1/(sqrt(3) L)");
    if (cfg.sigma_sq[t] < 0.0)
      throw std::invalid_argument("nseg: negative noise variance");
    if (cfg.mode != SamplingMode::kFullBatch) {
      if (cfg.batch_size[t] < 1)
        throw std::invalid_argument("nseg: batch sizes must be positive");
      used += 2L * cfg.batch_size[t];
    }
  }
  if (cfg.mode == SamplingMode::kDisjointSinglePass && used > n)
    throw std::invalid_argument(
        "nseg: single-pass schedule needs " + std::to_string(used) +
        " points but the dataset has " + std::to_string(n));
}

NsegEngine::NsegEngine(const ProblemInstance& inst, const Dataset& data,
                       const NsegConfig& cfg)
    : inst_(inst), data_(data), cfg_(cfg) {
  validate_nseg_config(inst, data.n(), cfg);
  if (cfg.mode == SamplingMode::kFullBatch) {
    full_batch_.resize(data.n());
    for (int i = 0; i < data.n(); ++i) full_batch_[i] = i;
  }
  if (cfg.mode == SamplingMode::kDisjointSinglePass) {
    slice_offset_.resize(cfg.T + 1, 0);
    for (int t = 0; t < cfg.T; ++t)
      slice_offset_[t + 1] = slice_offset_[t] + 2L * cfg.batch_size[t];
  }
  u_ = cfg.u0.has_value() ? *cfg.u0 : project(inst.set, Vector::Zero(inst.dim()));
  if (u_.size() != inst.dim())
    throw std::invalid_argument("nseg: starting point dimension mismatch");
  w_ = u_;
  weighted_sum_ = Vector::Zero(inst.dim());
}

void NsegEngine::draw_step(int t, Rng& sample, Rng& noise1, Rng& noise2,
                           NsegStepDraws& out) const {
  const int d = inst_.dim();
  switch (cfg_.mode) {
    case SamplingMode::kFullBatch:
      out.batch1 = full_batch_;
      out.batch2 = full_batch_;
      break;
    case SamplingMode::kDisjointSinglePass: {
      const int B = cfg_.batch_size[t - 1];
      const long base = slice_offset_[t - 1];
      out.batch1.resize(B);
      out.batch2.resize(B);
      for (int j = 0; j < B; ++j) {
        out.batch1[j] = static_cast<int>(base + j);
        out.batch2[j] = static_cast<int>(base + B + j);
      }
      break;
    }
    case SamplingMode::kWithReplacement: {
      const int B = cfg_.batch_size[t - 1];
      out.batch1.resize(B);
      out.batch2.resize(B);
      for (int j = 0; j < B; ++j)
        out.batch1[j] = static_cast<int>(sample.uniform_index(data_.n()));
      for (int j = 0; j < B; ++j)
        out.batch2[j] = static_cast<int>(sample.uniform_index(data_.n()));
      break;
    }
  }
  const double sigma = std::sqrt(cfg_.sigma_sq[t - 1]);
  out.xi1 = noise1.normal_vector(d, sigma);
  out.xi2 = noise2.normal_vector(d, sigma);
}

void NsegEngine::step(int t, const NsegStepDraws& d) {
  const double gamma = cfg_.gamma[t - 1];
  // w_t = project(u_{t-1} - gamma (F_{B1}(u_{t-1}) + xi1))
  eval_batch_operator_into(inst_, data_, d.batch1, u_, f_, scratch_);
  w_ = u_ - gamma * (f_ + d.xi1);
  project_in_place(inst_.set, w_);
  // u_t = project(u_{t-1} - gamma (F_{B2}(w_t) + xi2))
  eval_batch_operator_into(inst_, data_, d.batch2, w_, f_, scratch_);
  u_ -= gamma * (f_ + d.xi2);
  project_in_place(inst_.set, u_);

  weighted_sum_ += gamma * w_;
  gamma_sum_ += gamma;
}

Vector NsegEngine::output() const {
  if (gamma_sum_ > 0.0) return weighted_sum_ / gamma_sum_;
  return w_;  // degenerate all-zero schedule
}

NsegTrajectory nseg_run(const ProblemInstance& inst, const Dataset& data,
                        const NsegConfig& cfg) {
  NsegEngine engine(inst, data, cfg);
  Rng sample(derive_seed(cfg.seed, kSampleStream));
  Rng noise1(derive_seed(cfg.seed, kNoiseStream1));
  Rng noise2(derive_seed(cfg.seed, kNoiseStream2));

  NsegTrajectory traj;
  NsegStepDraws draws;
  for (int t = 1; t <= cfg.T; ++t) {
    engine.draw_step(t, sample, noise1, noise2, draws);
    engine.step(t, draws);
    if (cfg.record_iterates) {
      traj.u_hist.push_back(engine.u());
      traj.w_hist.push_back(engine.w());
      traj.draws.push_back(draws);
    }
  }
  traj.output = engine.output();
  traj.gamma_sum = 0.0;
  for (double g : cfg.gamma) traj.gamma_sum += g;
  return traj;
}

double nseg_noise_variance(double M, int B, double eps, double eta) {
  if (B < 1) throw std::invalid_argument("nseg noise: batch size must be >= 1");
  // Batch-mean sensitivity is 2M/B; this is the Gaussian mechanism variance.
  return gaussian_mechanism_variance(2.0 * M / B, eps, eta);
}

NsegConfig nseg_single_pass_policy(int n, int d, double eps, double eta,
                                   double M, double L, double D) {
  validate_budget(eps, eta);
  if (n < 2) throw std::invalid_argument("nseg single-pass: n must be >= 2");
  const double dln = d * std::log(1.0 / eta);
  const int B = std::max(
      1, static_cast<int>(std::floor(std::min(std::sqrt(dln) / eps,
                                              static_cast<double>(n)))));
  const int T = n / (2 * B);
  if (T < 1)
    throw std::invalid_argument(
        "nseg single-pass: dataset too small for batch size " + std::to_string(B));
  double gamma =
      D / (M * std::sqrt(7.0 * T * (1.0 + 8.0 * dln / (B * B * eps * eps))));
  const double cap = 1.0 / (std::sqrt(3.0) * std::max(L, 1e-300));
  if (L > 0.0 && gamma > cap) {
    std::cerr << "nseg single-pass policy: stepsize " << gamma
              << " clipped to " << cap << "\n";
    gamma = cap;
  }
  NsegConfig cfg;
  cfg.T = T;
  cfg.gamma.assign(T, gamma);
  cfg.batch_size.assign(T, B);
  cfg.sigma_sq.assign(T, nseg_noise_variance(M, B, eps, eta));
  cfg.mode = SamplingMode::kDisjointSinglePass;
  return cfg;
}

NsegConfig nseg_multipass_policy(int n, int d, double eps, double eta,
                                 double M, double L, double D) {
  validate_budget(eps, eta);
  if (n < 1) throw std::invalid_argument("nseg multipass: n must be >= 1");
  const double dln = d * std::log(1.0 / eta);
  const double base = L > 0.0 ? std::min(D / M, 1.0 / L) : D / M;
  double gamma =
      base / (n * std::max(std::sqrt(static_cast<double>(n)), std::sqrt(dln) / eps));
  const double cap = 1.0 / (std::sqrt(3.0) * std::max(L, 1e-300));
  if (L > 0.0 && gamma > cap) {
    std::cerr << "nseg multipass policy: stepsize " << gamma << " clipped to "
              << cap << "\n";
    gamma = cap;
  }
  NsegConfig cfg;
  cfg.T = n * n;
  cfg.gamma.assign(cfg.T, gamma);
  cfg.batch_size.assign(cfg.T, 1);
  cfg.sigma_sq.assign(cfg.T, 8.0 * M * M * std::log(1.0 / eta) / (eps * eps));
  cfg.mode = SamplingMode::kWithReplacement;
  return cfg;
}

NsegConfig nseg_nonprivate_multipass_policy(int n, double M, double L,
                                            double D) {
  if (n < 1) throw std::invalid_argument("nseg multipass: n must be >= 1");
  const double base = L > 0.0 ? std::min(D / M, 1.0 / L) : D / M;
  double gamma = base / (n * std::sqrt(static_cast<double>(n)));
  const double cap = 1.0 / (std::sqrt(3.0) * std::max(L, 1e-300));
  if (L > 0.0 && gamma > cap) gamma = cap;
  NsegConfig cfg;
  cfg.T = n * n;
  cfg.gamma.assign(cfg.T, gamma);
  cfg.batch_size.assign(cfg.T, 1);
  cfg.sigma_sq.assign(cfg.T, 0.0);
  cfg.mode = SamplingMode::kWithReplacement;
  return cfg;
}

double nseg_error_bound(const NsegConfig& cfg, double M, double L, double D,
                        int d) {
  (void)L;
  double gamma_sum = 0.0;
  double acc = D * D;
  for (int t = 0; t < cfg.T; ++t) {
    gamma_sum += cfg.gamma[t];
    acc += 7.0 * cfg.gamma[t] * cfg.gamma[t] *
           (M * M / 2.0 + d * cfg.sigma_sq[t]);
  }
  if (gamma_sum <= 0.0)
    throw std::invalid_argument("nseg_error_bound: sum of stepsizes is zero");
  return acc / gamma_sum;
}

}  // namespace dpvi
