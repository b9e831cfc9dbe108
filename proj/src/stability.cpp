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

#include "dpvi/stability.hpp"

#include <cmath>
#include <stdexcept>

#include "dpvi/eg_operator.hpp"
#include "dpvi/parallel.hpp"

namespace dpvi {

namespace {

constexpr double kViolationTol = 1e-9;
constexpr double kFixedPointTol = 1e-10;

bool same_draws(const NsegStepDraws& a, const NsegStepDraws& b) {
  return a.batch1 == b.batch1 && a.batch2 == b.batch2 &&
         (a.xi1.array() == b.xi1.array()).all() &&
         (a.xi2.array() == b.xi2.array()).all();
}

int multiplicity(const std::vector<int>& batch, int i) {
  int m = 0;
  for (int b : batch) m += (b == i);
  return m;
}

}  // namespace

CoupledRunReport coupled_run_nseg(const ProblemInstance& inst, const Dataset& S,
                                  int i, const Datapoint& replacement,
                                  const NsegConfig& cfg,
                                  bool use_fixed_point_diagnostics) {
  if (i < 0 || i >= S.n())
    throw std::invalid_argument("coupled_run: index out of range");
  const Dataset S2 = make_neighbor(S, i, replacement);
  const bool differs = !datapoint_equal(S.points[i], replacement);

  NsegEngine ea(inst, S, cfg), eb(inst, S2, cfg);
  // Independently constructed stream pairs with the same seed; their equality
  // below is the shared-randomness verification.
  Rng sa(derive_seed(cfg.seed, 1)), na1(derive_seed(cfg.seed, 2)),
      na2(derive_seed(cfg.seed, 3));
  Rng sb(derive_seed(cfg.seed, 1)), nb1(derive_seed(cfg.seed, 2)),
      nb2(derive_seed(cfg.seed, 3));

  CoupledRunReport rep;
  rep.solver = SolverKind::kNseg;
  rep.randomness_verified = true;
  rep.steps.reserve(cfg.T);

  NsegStepDraws da, db;
  double bound = 0.0;
  for (int t = 1; t <= cfg.T; ++t) {
    ea.draw_step(t, sa, na1, na2, da);
    eb.draw_step(t, sb, nb1, nb2, db);
    if (!same_draws(da, db)) {
      rep.randomness_verified = false;
      throw std::logic_error("coupled_run_nseg: stream misalignment detected");
    }
    CoupledStepDiag diag;
    diag.gamma = cfg.gamma[t - 1];
    diag.batch_size = static_cast<int>(da.batch1.size());
    diag.slot1_mult = differs ? multiplicity(da.batch1, i) : 0;
    diag.slot2_mult = differs ? multiplicity(da.batch2, i) : 0;
    diag.noise1_norm = da.xi1.norm();
    diag.noise2_norm = da.xi2.norm();

    const double gL = diag.gamma * inst.L;
    if (use_fixed_point_diagnostics && gL < 0.95 && inst.dim() <= 20) {
      // Measured M~ terms through the fixed points of the noisy operators.
      Vector scratch;
      OperatorFn f1 = [&](const Vector& z, Vector& out) {
        eval_batch_operator_into(inst, S, da.batch1, z, out, scratch);
        out += da.xi1;
      };
      OperatorFn f2 = [&](const Vector& z, Vector& out) {
        eval_batch_operator_into(inst, S, da.batch2, z, out, scratch);
        out += da.xi2;
      };
      Vector tmp1, tmp2;
      double sum = 0.0;
      for (const Vector* anchor : {&ea.u(), &eb.u()}) {
        const Vector r1 = eg_fixed_point(f1, inst.set, diag.gamma, inst.L,
                                         *anchor, kFixedPointTol);
        const Vector r2 = eg_fixed_point(f2, inst.set, diag.gamma, inst.L,
                                         *anchor, kFixedPointTol);
        f1(r1, tmp1);
        f2(r2, tmp2);
        sum += (tmp1 - tmp2).norm();
      }
      diag.mtilde_sum = sum;
      diag.mtilde_measured = true;
    } else {
      // Sure majorant 2M + ||xi1|| + ||xi2|| per M~ term.
      diag.mtilde_sum =
          2.0 * (2.0 * inst.M + diag.noise1_norm + diag.noise2_norm);
      diag.mtilde_measured = false;
    }

    ea.step(t, da);
    eb.step(t, db);
    diag.delta = (ea.u() - eb.u()).norm();
    if (rep.first_divergence_step < 0 &&
        (diag.slot1_mult > 0 || diag.slot2_mult > 0))
      rep.first_divergence_step = t;

    const double B = static_cast<double>(diag.batch_size);
    const double d1 = 2.0 * inst.M * diag.slot1_mult / B;
    const double d2 = 2.0 * inst.M * diag.slot2_mult / B;
    bound += (diag.mtilde_sum + 2.0 * inst.L * inst.D) * inst.L * diag.gamma *
                 diag.gamma +
             inst.L * d1 * diag.gamma * diag.gamma + d2 * diag.gamma;
    const double tol = kViolationTol * std::max(1.0, inst.M * diag.gamma);
    if (diag.delta > bound + tol) {
      ++rep.bound_violations;
      rep.max_violation = std::max(rep.max_violation, diag.delta - bound);
    }
    rep.steps.push_back(std::move(diag));
  }
  rep.bound = bound;
  rep.output_distance = (ea.output() - eb.output()).norm();
  return rep;
}

CoupledRunReport coupled_run_nispp(const ProblemInstance& inst,
                                   const Dataset& S, int i,
                                   const Datapoint& replacement,
                                   const NisppConfig& cfg) {
  if (i < 0 || i >= S.n())
    throw std::invalid_argument("coupled_run: index out of range");
  const Dataset S2 = make_neighbor(S, i, replacement);
  const bool differs = !datapoint_equal(S.points[i], replacement);

  NisppEngine ea(inst, S, cfg), eb(inst, S2, cfg);
  Rng sa(derive_seed(cfg.seed, 1)), na(derive_seed(cfg.seed, 4));
  Rng sb(derive_seed(cfg.seed, 1)), nb(derive_seed(cfg.seed, 4));

  CoupledRunReport rep;
  rep.solver = SolverKind::kNispp;
  rep.randomness_verified = true;
  rep.steps.reserve(cfg.K + 1);

  NisppStepDraws da, db;
  Vector fa, fb, scratch;
  double bound = 0.0;
  for (int k = 0; k <= cfg.K; ++k) {
    ea.draw_step(k, sa, na, da);
    eb.draw_step(k, sb, nb, db);
    if (da.batch != db.batch || !(da.xi.array() == db.xi.array()).all()) {
      rep.randomness_verified = false;
      throw std::logic_error("coupled_run_nispp: stream misalignment detected");
    }
    const NisppStepInfo ia = ea.step(k, da);
    const NisppStepInfo ib = eb.step(k, db);

    CoupledStepDiag diag;
    diag.gamma = cfg.gamma[k];
    diag.lambda = cfg.lambda[k];
    diag.batch_size = cfg.batch;
    diag.nu_cert = ia.cert.nu_actual;
    diag.nu_cert_prime = ib.cert.nu_actual;
    diag.noise1_norm = da.xi.norm();
    diag.delta = (ea.u() - eb.u()).norm();
    const bool batch_hits = differs && multiplicity(da.batch, i) > 0;
    diag.slot1_mult = batch_hits ? multiplicity(da.batch, i) : 0;
    // a_{k+1} = ||F_B(u_{k+1}) - F_B'(u_{k+1})|| on the shared index batch.
    if (batch_hits) {
      eval_batch_operator_into(inst, S, da.batch, ea.u(), fa, scratch);
      eval_batch_operator_into(inst, S2, da.batch, ea.u(), fb, scratch);
      diag.a = (fa - fb).norm();
    } else {
      diag.a = 0.0;
    }
    if (rep.first_divergence_step < 0 && batch_hits)
      rep.first_divergence_step = k;

    if (rep.first_divergence_step >= 0) {
      const double nu_k = std::max(diag.nu_cert, diag.nu_cert_prime);
      bound += 2.0 * diag.a / diag.lambda + std::sqrt(4.0 * nu_k / diag.lambda);
    }
    const double tol = kViolationTol * std::max(1.0, inst.M / diag.lambda);
    if (diag.delta > bound + tol) {
      ++rep.bound_violations;
      rep.max_violation = std::max(rep.max_violation, diag.delta - bound);
    }
    rep.steps.push_back(std::move(diag));
  }
  rep.bound = bound;
  rep.output_distance = (ea.output() - eb.output()).norm();
  return rep;
}

double nseg_per_run_bound(const CoupledRunReport& report,
                          const ProblemInstance& inst) {
  double bound = 0.0;
  for (const auto& s : report.steps) {
    const double B = static_cast<double>(s.batch_size);
    const double d1 = 2.0 * inst.M * s.slot1_mult / B;
    const double d2 = 2.0 * inst.M * s.slot2_mult / B;
    bound += (s.mtilde_sum + 2.0 * inst.L * inst.D) * inst.L * s.gamma * s.gamma +
             inst.L * d1 * s.gamma * s.gamma + d2 * s.gamma;
  }
  return bound;
}

double nispp_per_run_bound(const CoupledRunReport& report) {
  double bound = 0.0;
  bool started = false;
  for (const auto& s : report.steps) {
    if (!started && s.a == 0.0 && s.slot1_mult == 0) continue;
    started = true;
    const double nu_k = std::max(s.nu_cert, s.nu_cert_prime);
    bound += 2.0 * s.a / s.lambda + std::sqrt(4.0 * nu_k / s.lambda);
  }
  return bound;
}

double nseg_expectation_bound(const NsegConfig& cfg,
                              const ProblemInstance& inst, int n, int d) {
  const double M = inst.M, L = inst.L, D = inst.D;
  double first = 0.0, second = 0.0;
  for (int t = 0; t < cfg.T; ++t) {
    const double g = cfg.gamma[t];
    const double sigma = std::sqrt(cfg.sigma_sq[t]);
    first += (4.0 * M + 2.0 * L * D + 4.0 * std::sqrt(double(d)) * sigma) * L *
                 g * g +
             2.0 * M * L / n * g * g + 2.0 * M / n * g;
    second += (2.0 * M * L / n + 2.0 * L * D) * g;
  }
  return first + second / cfg.T;
}

double nispp_expectation_bound(const NisppConfig& cfg,
                               const ProblemInstance& inst, int n) {
  // K terms (k = 1..K) of 2M/(n lambda_k) + sqrt(4 nu / lambda_k).
  double bound = 0.0;
  for (int k = 1; k <= cfg.K; ++k)
    bound += 2.0 * inst.M / (n * cfg.lambda[k]) +
             std::sqrt(4.0 * cfg.nu / cfg.lambda[k]);
  return bound;
}

UasEstimate uas_estimate(const ProblemInstance& inst,
                         const DataDistribution& dist, int n,
                         const UasConfig& cfg, int trials, std::uint64_t seed,
                         int jobs) {
  if (trials < 10)
    throw std::invalid_argument("uas_estimate: needs at least 10 trials");
  std::vector<double> dist_out(trials, 0.0);
  std::vector<int> violations(trials, 0);

  parallel_for_indexed(trials, jobs, [&](int trial) {
    const Dataset S = sample_dataset(dist, n, derive_seed(seed, 300, trial));
    Rng pick(derive_seed(seed, 400, trial));
    const int i = static_cast<int>(pick.uniform_index(n));
    const Datapoint replacement = sample_datapoint(dist, pick);
    CoupledRunReport rep;
    if (std::holds_alternative<NsegConfig>(cfg.solver_cfg)) {
      NsegConfig c = std::get<NsegConfig>(cfg.solver_cfg);
      c.seed = derive_seed(seed, 500, trial);
      rep = coupled_run_nseg(inst, S, i, replacement, c,
                             cfg.use_fixed_point_diagnostics);
    } else {
      NisppConfig c = std::get<NisppConfig>(cfg.solver_cfg);
      c.seed = derive_seed(seed, 500, trial);
      rep = coupled_run_nispp(inst, S, i, replacement, c);
    }
    dist_out[trial] = rep.output_distance;
    violations[trial] = rep.bound_violations;
  });

  UasEstimate est;
  est.trials = trials;
  double mean = 0.0, mx = 0.0;
  for (double v : dist_out) {
    mean += v;
    mx = std::max(mx, v);
  }
  mean /= trials;
  double ss = 0.0;
  for (double v : dist_out) ss += (v - mean) * (v - mean);
  est.mean = mean;
  est.max = mx;
  est.std_error = trials > 1 ? std::sqrt(ss / (trials - 1.0) / trials) : 0.0;
  for (int v : violations) est.per_run_bound_violations += v;

  if (std::holds_alternative<NsegConfig>(cfg.solver_cfg)) {
    est.expectation_bound = nseg_expectation_bound(
        std::get<NsegConfig>(cfg.solver_cfg), inst, n, inst.dim());
  } else {
    const auto& c = std::get<NisppConfig>(cfg.solver_cfg);
    est.expectation_bound = nispp_expectation_bound(c, inst, n);
    // High-probability check applies when K B >= 4 n ln(n * trials).
    const double need = 4.0 * n * std::log(static_cast<double>(n) * trials);
    est.hp_applicable = static_cast<double>(c.K) * c.batch >= need;
    if (est.hp_applicable) {
      const double lambda = c.lambda[0];
      est.hp_bound = 4.0 * inst.M * c.K / (lambda * n) +
                     c.K * std::sqrt(4.0 * c.nu / lambda);
      est.hp_ok = est.max <= est.hp_bound;
    }
  }
  return est;
}

ProxSensitivityReport prox_sensitivity_check(const ProblemInstance& inst,
                                             const DataDistribution& dist,
                                             const Vector& w_k, double lambda,
                                             int B, double nu, int trials,
                                             std::uint64_t seed) {
  if (nu > 2.0 * inst.M * inst.M / (lambda * B * B) * (1.0 + 1e-12))
    throw std::invalid_argument(
        "prox_sensitivity_check: requires nu <= 2 M^2/(lambda B^2)");
  ProxSensitivityReport rep;
  rep.trials = trials;
  const double zeta =
      nu / (inst.L * inst.D + inst.M + 2.0 * lambda * inst.D);
  rep.bound = nispp_sensitivity_bound(inst.M, lambda, B, nu) + 2.0 * zeta;

  std::vector<int> idx(B);
  for (int j = 0; j < B; ++j) idx[j] = j;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, 600, trial));
    Dataset batch;
    batch.points.reserve(B);
    for (int j = 0; j < B; ++j)
      batch.points.push_back(sample_datapoint(dist, rng));
    const int j = static_cast<int>(rng.uniform_index(B));
    const Dataset batch2 = make_neighbor(batch, j, sample_datapoint(dist, rng));

    ProxCertificate ca, cb;
    const Vector u = certified_prox_solve(inst, batch, idx, w_k, lambda, nu, 4, ca);
    const Vector v = certified_prox_solve(inst, batch2, idx, w_k, lambda, nu, 4, cb);
    const double d = (u - v).norm();
    rep.max_distance = std::max(rep.max_distance, d);
    if (d > rep.bound) ++rep.violations;
  }
  return rep;
}

}  // namespace dpvi
