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

#include "dpvi/nispp.hpp"

#include <cmath>
#include <stdexcept>

#include "dpvi/privacy.hpp"

namespace dpvi {

namespace {
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kNoiseStream = 4;

// One OE update: z+ = project(z - step (F_k(z) + (F_k(z) - F_k(z_prev))/kappa)).
// State carries the pair (z_prev, z) and the operator value at z_prev.
struct OeState {
  Vector z_prev, z, f_prev, f_cur;
};

void oe_advance(const OperatorFn& Fk, const FeasibleSet& set, double step,
                double kappa, OeState& s, int iters) {
  for (int t = 0; t < iters; ++t) {
    Fk(s.z, s.f_cur);
    Vector next =
        s.z - step * (s.f_cur + (1.0 / kappa) * (s.f_cur - s.f_prev));
    project_in_place(set, next);
    s.z_prev = s.z;
    s.z = std::move(next);
    std::swap(s.f_prev, s.f_cur);
  }
}

}  // namespace

Vector oe_solve(const OperatorFn& F, const Vector& w_k, double lambda, double L,
                const FeasibleSet& set, int T_inner) {
  if (!(lambda > 0.0)) throw std::invalid_argument("oe_solve: lambda must be positive");
  if (T_inner < 1) throw std::invalid_argument("oe_solve: T_inner must be >= 1");
  const double step = 1.0 / (2.0 * (L + lambda));
  const double kappa = lambda / (L + lambda) + 1.0;
  OperatorFn Fk = [&F, &w_k, lambda](const Vector& z, Vector& out) {
    F(z, out);
    out += lambda * (z - w_k);
  };
  OeState s;
  s.z_prev = w_k;
  s.z = w_k;
  Fk(s.z_prev, s.f_prev);
  s.f_cur = s.f_prev;
  oe_advance(Fk, set, step, kappa, s, T_inner);
  return s.z;
}

ProxCertificate certify_prox_solution(const ProblemInstance& inst,
                                      const Dataset& data,
                                      std::span<const int> batch,
                                      const Vector& u, const Vector& w_k,
                                      double lambda, const FeasibleSet& set) {
  if (!contains(set, u, 1e-7))
    throw std::invalid_argument("certify_prox_solution: point is infeasible");
  Vector g, scratch;
  eval_batch_operator_into(inst, data, batch, u, g, scratch);
  g += lambda * (u - w_k);
  ProxCertificate cert;
  cert.nu_actual = std::max(0.0, g.dot(u) + support_max(set, -g).value);
  return cert;
}

int oe_iteration_count(double L, double lambda, double M, double D, double nu) {
  if (!(lambda > 0.0 && nu > 0.0 && D > 0.0))
    throw std::invalid_argument("oe_iteration_count: arguments must be positive");
  const double kappa = lambda / (L + lambda) + 1.0;
  const double arg = (L * D * D + M * D + 2.0 * lambda * D * D) / nu;
  return static_cast<int>(std::ceil(2.0 * kappa * std::log(arg)));
}

void validate_nispp_config(const ProblemInstance& inst, int n,
                           const NisppConfig& cfg) {
  if (cfg.K < 0) throw std::invalid_argument("nispp: K must be >= 0");
  const int steps = cfg.K + 1;
  if (static_cast<int>(cfg.gamma.size()) != steps ||
      static_cast<int>(cfg.lambda.size()) != steps ||
      static_cast<int>(cfg.sigma_sq.size()) != steps)
    throw std::invalid_argument("nispp: schedule lengths must equal K+1");
  if (cfg.batch < 1) throw std::invalid_argument("nispp: batch size must be >= 1");
  if (cfg.nu < 0.0) throw std::invalid_argument("nispp: nu must be >= 0");
  const double prod0 = cfg.gamma[0] * cfg.lambda[0];
  for (int k = 0; k < steps; ++k) {
    if (!(cfg.gamma[k] > 0.0 && cfg.lambda[k] > 0.0))
      throw std::invalid_argument("nispp: weights and regularizers must be positive");
    if (std::abs(cfg.gamma[k] * cfg.lambda[k] - prod0) >
        1e-9 * std::max(1.0, std::abs(prod0)))
      throw std::invalid_argument("nispp: gamma_k lambda_k must be constant in k");
    if (cfg.sigma_sq[k] < 0.0)
      throw std::invalid_argument("nispp: negative noise variance");
  }
  if (cfg.mode == SamplingMode::kDisjointSinglePass &&
      static_cast<long>(steps) * cfg.batch > n)
    throw std::invalid_argument("nispp: single-pass schedule needs (K+1) B <= n");
  if (cfg.mode == SamplingMode::kWithReplacement && cfg.batch > n)
    throw std::invalid_argument("nispp: batch larger than dataset");
  if (cfg.mode == SamplingMode::kFullBatch)
    throw std::invalid_argument("nispp: full-batch mode is not defined");
  (void)inst;
}

NisppEngine::NisppEngine(const ProblemInstance& inst, const Dataset& data,
                         const NisppConfig& cfg)
    : inst_(inst), data_(data), cfg_(cfg) {
  validate_nispp_config(inst, data.n(), cfg);
  if (cfg.mode == SamplingMode::kWithReplacement) {
    pool_.resize(data.n());
    for (int i = 0; i < data.n(); ++i) pool_[i] = i;
  }
  w_ = cfg.w0.has_value() ? *cfg.w0 : project(inst.set, Vector::Zero(inst.dim()));
  if (w_.size() != inst.dim())
    throw std::invalid_argument("nispp: starting point dimension mismatch");
  u_ = w_;
  weighted_sum_ = Vector::Zero(inst.dim());
  noise_sum_ = Vector::Zero(inst.dim());
}

void NisppEngine::draw_step(int k, Rng& sample, Rng& noise,
                            NisppStepDraws& out) {
  const int B = cfg_.batch;
  out.batch.resize(B);
  if (cfg_.mode == SamplingMode::kDisjointSinglePass) {
    for (int j = 0; j < B; ++j) out.batch[j] = k * B + j;
  } else {
    // Uniform B-subset via partial Fisher-Yates; positions are drawn with
    // replacement across iterations, indices are distinct within a batch.
    const int n = data_.n();
    for (int j = 0; j < B; ++j) {
      const int r = j + static_cast<int>(sample.uniform_index(n - j));
      std::swap(pool_[j], pool_[r]);
      out.batch[j] = pool_[j];
    }
  }
  out.xi = noise.normal_vector(inst_.dim(), std::sqrt(cfg_.sigma_sq[k]));
}

Vector certified_prox_solve(const ProblemInstance& inst, const Dataset& data,
                            std::span<const int> batch, const Vector& w_k,
                            double lambda, double nu, int cap_multiplier,
                            ProxCertificate& cert) {
  const double L = inst.L;
  const double step = 1.0 / (2.0 * (L + lambda));
  const double kappa = lambda / (L + lambda) + 1.0;
  Vector scratch;
  OperatorFn Fk = [&](const Vector& z, Vector& out) {
    eval_batch_operator_into(inst, data, batch, z, out, scratch);
    out += lambda * (z - w_k);
  };
  const int T0 = oe_iteration_count(L, lambda, inst.M, inst.D, nu);
  OeState s;
  s.z_prev = w_k;
  s.z = w_k;
  Fk(s.z_prev, s.f_prev);
  s.f_cur = s.f_prev;

  int total = 0;
  int budget = T0;
  while (true) {
    oe_advance(Fk, inst.set, step, kappa, s, budget - total);
    total = budget;
    Vector candidate = project(inst.set, s.z);  // guard rounding drift
    cert = certify_prox_solution(inst, data, batch, candidate, w_k, lambda,
                                 inst.set);
    cert.inner_iterations = total;
    if (cert.nu_actual <= nu) return candidate;
    if (budget >= cap_multiplier * T0)
      throw SolverFailure(
          "nispp inner solve failed to certify: nu_actual = " +
          std::to_string(cert.nu_actual) + " > nu = " + std::to_string(nu) +
          " after " + std::to_string(total) + " iterations");
    budget = std::min(2 * budget, cap_multiplier * T0);
  }
}

Vector NisppEngine::solve_prox(const std::vector<int>& batch, double lambda,
                               ProxCertificate& cert) {
  return certified_prox_solve(inst_, data_, batch, w_, lambda, cfg_.nu,
                              cfg_.inner_cap_multiplier, cert);
}

NisppStepInfo NisppEngine::step(int k, const NisppStepDraws& d) {
  NisppStepInfo info;
  u_ = solve_prox(d.batch, cfg_.lambda[k], info.cert);
  w_ = u_ + d.xi;  // deliberately not projected
  info.noise_norm = d.xi.norm();
  weighted_sum_ += cfg_.gamma[k] * w_;
  noise_sum_ += cfg_.gamma[k] * d.xi;
  gamma_sum_ += cfg_.gamma[k];
  return info;
}

Vector NisppEngine::average_raw() const { return weighted_sum_ / gamma_sum_; }

Vector NisppEngine::noise_average() const { return noise_sum_ / gamma_sum_; }

Vector NisppEngine::output() const {
  return project(inst_.set, average_raw());
}

NisppTrajectory nispp_run(const ProblemInstance& inst, const Dataset& data,
                          const NisppConfig& cfg) {
  NisppEngine engine(inst, data, cfg);
  Rng sample(derive_seed(cfg.seed, kSampleStream));
  Rng noise(derive_seed(cfg.seed, kNoiseStream));

  NisppTrajectory traj;
  NisppStepDraws draws;
  traj.steps.reserve(cfg.K + 1);
  for (int k = 0; k <= cfg.K; ++k) {
    engine.draw_step(k, sample, noise, draws);
    traj.steps.push_back(engine.step(k, draws));
    if (cfg.record_iterates) {
      traj.u_hist.push_back(engine.u());
      traj.w_hist.push_back(engine.w());
      traj.batches.push_back(draws.batch);
    }
  }
  traj.output = engine.output();
  traj.average_raw = engine.average_raw();
  traj.noise_average = engine.noise_average();
  return traj;
}

double nispp_sensitivity_bound(double M, double lambda, int B, double nu) {
  if (!(lambda > 0.0) || B < 1)
    throw std::invalid_argument("nispp sensitivity: need lambda > 0, B >= 1");
  if (nu > 2.0 * M * M / (lambda * B * B) * (1.0 + 1e-12))
    throw std::domain_error(
        "nispp sensitivity: requires nu <= 2 M^2 / (lambda B^2)");
  return 4.0 * M / (lambda * B);
}

double nispp_noise_variance(double M, double lambda, int B, double eps,
                            double eta) {
  if (!(lambda > 0.0) || B < 1)
    throw std::invalid_argument("nispp noise: need lambda > 0, B >= 1");
  return gaussian_mechanism_variance(4.0 * M / (lambda * B), eps, eta);
}

NisppConfig nispp_single_pass_policy(int n, int d, double eps, double eta,
                                     double M, double L, double D) {
  validate_budget(eps, eta);
  if (n < 8) throw std::invalid_argument("nispp single-pass: n must be >= 8");
  const int B = std::max(1, static_cast<int>(std::floor(std::cbrt(n))));
  const int K = n / B - 1;
  if (K < 1)
    throw std::invalid_argument("nispp single-pass: dataset too small");
  const double dln = d * std::log(1.0 / eta);
  const double lambda0 = std::max(M / D, L) *
                         std::max(std::cbrt(static_cast<double>(n)),
                                  std::sqrt(dln) / eps);
  NisppConfig cfg;
  cfg.K = K;
  cfg.gamma.assign(K + 1, 1.0);
  cfg.lambda.assign(K + 1, lambda0);
  cfg.batch = B;
  cfg.nu = 2.0 * M * M / (lambda0 * B * B);
  cfg.sigma_sq.assign(K + 1, nispp_noise_variance(M, lambda0, B, eps, eta));
  cfg.mode = SamplingMode::kDisjointSinglePass;
  return cfg;
}

NisppConfig nispp_multipass_policy(int n, int d, double eps, double eta,
                                   double M, double L, double D) {
  validate_budget(eps, eta);
  if (n < 4) throw std::invalid_argument("nispp multipass: n must be >= 4");
  const int B = std::max(1, static_cast<int>(std::floor(std::sqrt(n))));
  const double dln = d * std::log(1.0 / eta);
  const double lambda0 =
      std::max(M / D, L) *
      std::max(std::sqrt(static_cast<double>(n)), std::sqrt(dln) / eps);
  const double sigma = 8.0 * M * std::sqrt(std::log(1.0 / eta)) /
                       (B * lambda0 * eps);
  NisppConfig cfg;
  cfg.K = n;
  cfg.gamma.assign(n + 1, 1.0);
  cfg.lambda.assign(n + 1, lambda0);
  cfg.batch = B;
  cfg.nu = M * M / (lambda0 * static_cast<double>(n) * n);
  cfg.sigma_sq.assign(n + 1, sigma * sigma);
  cfg.mode = SamplingMode::kWithReplacement;
  return cfg;
}

NisppConfig nispp_nonprivate_multipass_policy(int n, double M, double L,
                                              double D) {
  if (n < 4) throw std::invalid_argument("nispp multipass: n must be >= 4");
  const int B = std::max(1, static_cast<int>(std::floor(std::sqrt(n))));
  const double lambda0 = std::max(M / D, L) * std::sqrt(static_cast<double>(n));
  NisppConfig cfg;
  cfg.K = n;
  cfg.gamma.assign(n + 1, 1.0);
  cfg.lambda.assign(n + 1, lambda0);
  cfg.batch = B;
  cfg.nu = M * M / (lambda0 * static_cast<double>(n) * n);
  cfg.sigma_sq.assign(n + 1, 0.0);
  cfg.mode = SamplingMode::kWithReplacement;
  return cfg;
}

double nispp_error_bound(const NisppConfig& cfg, double M, double L, double D,
                         int d) {
  const int steps = cfg.K + 1;
  if (static_cast<int>(cfg.gamma.size()) != steps ||
      static_cast<int>(cfg.lambda.size()) != steps ||
      static_cast<int>(cfg.sigma_sq.size()) != steps)
    throw std::invalid_argument("nispp_error_bound: schedule lengths must equal K+1");
  const double prod0 = cfg.gamma[0] * cfg.lambda[0];
  double gamma_sum = 0.0, gamma_sq_sum = 0.0, sigma_tail = 0.0,
         noise_quad = 0.0;
  for (int k = 0; k < steps; ++k) {
    if (std::abs(cfg.gamma[k] * cfg.lambda[k] - prod0) >
        1e-9 * std::max(1.0, std::abs(prod0)))
      throw std::domain_error(
          "nispp_error_bound: requires gamma_k lambda_k constant in k");
    gamma_sum += cfg.gamma[k];
    gamma_sq_sum += cfg.gamma[k] * cfg.gamma[k];
    if (k >= 1) sigma_tail += cfg.sigma_sq[k];
    noise_quad += cfg.gamma[k] * cfg.gamma[k] * cfg.sigma_sq[k];
  }
  const double z0 = 1.5 * prod0 * D * D +
                    (4.0 * M * M + 3.0 * L * L * D * D) / prod0 * gamma_sq_sum +
                    2.5 * prod0 * d * sigma_tail;
  return cfg.nu + z0 / gamma_sum +
         M * std::sqrt(noise_quad * d) / gamma_sum;
}

}  // namespace dpvi
