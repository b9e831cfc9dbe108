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

#include "dpvi/gap.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "dpvi/parallel.hpp"

namespace dpvi {

std::string gap_tier_name(GapTier t) {
  switch (t) {
    case GapTier::kClosedForm: return "closed_form";
    case GapTier::kSpSurrogate: return "sp_surrogate";
    case GapTier::kGrid: return "grid";
  }
  return "unknown";
}

namespace {

Datapoint source_payload(const ProblemInstance& inst, const GapSource& src) {
  if (src.data != nullptr) return mean_payload(inst, *src.data);
  if (!inst.population.has_value())
    throw std::invalid_argument("gap: population payload unavailable");
  return *inst.population;
}

void check_feasible(const ProblemInstance& inst, const Vector& u) {
  if (!contains(inst.set, u, 1e-7))
    throw std::invalid_argument("gap: point is not feasible");
}

std::pair<const FeasibleSet*, const FeasibleSet*> split_sets(
    const ProblemInstance& inst) {
  const auto* prod = std::get_if<ProductSet>(&inst.set.variant());
  if (prod == nullptr || prod->factors.size() != 2)
    throw std::invalid_argument("gap: bilinear instance requires Product(X, Y)");
  return {&prod->factors[0], &prod->factors[1]};
}

}  // namespace

double strong_sp_gap(const ProblemInstance& inst, const GapSource& src,
                     const Vector& x, const Vector& y) {
  if (inst.family != Family::kBilinearSp)
    throw std::domain_error("strong_sp_gap: not a saddle-point family");
  const auto [X, Y] = split_sets(inst);
  if (x.size() != X->dimension() || y.size() != Y->dimension())
    throw std::invalid_argument("strong_sp_gap: block dimensions mismatch");
  check_feasible(inst, (Vector(inst.dim()) << x, y).finished());
  const auto payload = std::get<BilinearPayload>(source_payload(inst, src));
  // sup_{y'} f(x, y') = a'x + max_{y'} <A'x + b, y'>
  const double sup_y = payload.a.dot(x) +
                       support_max(*Y, payload.A.transpose() * x + payload.b).value;
  // inf_{x'} f(x', y) = b'y - max_{x'} <-(A y + a), x'>
  const double inf_x = payload.b.dot(y) -
                       support_max(*X, -(payload.A * y + payload.a)).value;
  return sup_y - inf_x;
}

GapValue strong_vi_gap(const ProblemInstance& inst, const GapSource& src,
                       const Vector& u, int grid_resolution) {
  check_feasible(inst, u);
  switch (inst.family) {
    case Family::kConstantOp: {
      const auto payload = std::get<ConstantPayload>(source_payload(inst, src));
      const Vector g = inst.M * payload.beta;
      return GapValue{g.dot(u) + support_max(inst.set, -g).value,
                      GapTier::kClosedForm};
    }
    case Family::kBilinearSp: {
      const int d1 = inst.primal_dim();
      // The SP gap upper-bounds the VI gap; reported as a labeled surrogate.
      return GapValue{
          strong_sp_gap(inst, src, u.head(d1), u.tail(inst.dim() - d1)),
          GapTier::kSpSurrogate};
    }
    default: {
      if (inst.dim() > 3)
        throw std::domain_error(
            "strong_vi_gap: no evaluator for this family above dimension 3");
      return GapValue{brute_force_gap_oracle(inst, src, u, grid_resolution),
                      GapTier::kGrid};
    }
  }
}

GapValue strong_gap(const ProblemInstance& inst, const GapSource& src,
                    const Vector& point) {
  if (inst.family == Family::kBilinearSp) {
    const int d1 = inst.primal_dim();
    return GapValue{
        strong_sp_gap(inst, src, point.head(d1), point.tail(inst.dim() - d1)),
        GapTier::kSpSurrogate};
  }
  return strong_vi_gap(inst, src, point);
}

double brute_force_grid_spacing(const ProblemInstance& inst, int resolution) {
  const Box bb = bounding_box(inst.set);
  double h = 0.0;
  for (int i = 0; i < bb.lower.size(); ++i) {
    const double width = bb.upper[i] - bb.lower[i];
    h = std::max(h, resolution > 1 ? width / (resolution - 1) : width);
  }
  return h;
}

double brute_force_gap_oracle(const ProblemInstance& inst, const GapSource& src,
                              const Vector& u, int resolution) {
  if (inst.dim() > 3)
    throw std::domain_error("brute_force_gap_oracle: supports d <= 3 only");
  if (resolution < 1)
    throw std::invalid_argument("brute_force_gap_oracle: resolution must be >= 1");
  check_feasible(inst, u);
  const auto payload = source_payload(inst, src);
  const Box bb = bounding_box(inst.set);
  const int d = inst.dim();

  Vector w(d), fw(d);
  std::vector<int> ticks(d, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    for (int i = 0; i < d; ++i) {
      const double width = bb.upper[i] - bb.lower[i];
      w[i] = resolution > 1
                 ? bb.lower[i] + width * ticks[i] / (resolution - 1)
                 : 0.5 * (bb.lower[i] + bb.upper[i]);
    }
    project_in_place(inst.set, w);  // every evaluated point is feasible
    eval_datapoint_operator_into(inst, payload, w, fw);
    best = std::max(best, fw.dot(u - w));
    int axis = 0;
    while (axis < d && ++ticks[axis] == resolution) {
      ticks[axis] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
  return best;
}

WeakGapEstimate weak_gap_from_outputs(const ProblemInstance& inst,
                                      const std::vector<Vector>& outputs) {
  const int R = static_cast<int>(outputs.size());
  if (R < 2)
    throw std::invalid_argument("weak gap estimate: needs at least 2 replicas");
  const GapSource pop = GapSource::population();
  Vector sum = Vector::Zero(inst.dim());
  for (const auto& o : outputs) sum += o;
  WeakGapEstimate est;
  est.replicas = R;
  est.mean_output = sum / R;
  est.estimate = strong_gap(inst, pop, est.mean_output).value;

  // Jackknife over replicas of the gap at the leave-one-out mean.
  double jack_mean = 0.0;
  std::vector<double> jack(R);
  for (int i = 0; i < R; ++i) {
    const Vector loo = (sum - outputs[i]) / (R - 1);
    jack[i] = strong_gap(inst, pop, project(inst.set, loo)).value;
    jack_mean += jack[i];
  }
  jack_mean /= R;
  double ss = 0.0;
  for (double v : jack) ss += (v - jack_mean) * (v - jack_mean);
  est.std_error = std::sqrt((R - 1.0) / R * ss);

  double gap_sum = 0.0;
  for (const auto& o : outputs) gap_sum += strong_gap(inst, pop, o).value;
  est.mean_strong_gap = gap_sum / R;
  return est;
}

namespace {

void run_replicas(const ProblemInstance& inst, const DataDistribution& dist,
                  const SolverClosure& solver, int n, int R,
                  std::uint64_t seed, int jobs, std::vector<Vector>& outputs,
                  std::vector<double>* emp_gaps) {
  outputs.assign(R, Vector());
  if (emp_gaps) emp_gaps->assign(R, 0.0);
  parallel_for_indexed(R, jobs, [&](int r) {
    const Dataset data = sample_dataset(dist, n, derive_seed(seed, 100, r));
    const Vector out = solver(data, derive_seed(seed, 200, r));
    if (emp_gaps)
      (*emp_gaps)[r] = strong_gap(inst, GapSource::empirical(data), out).value;
    outputs[r] = out;
  });
}

}  // namespace

WeakGapEstimate weak_gap_estimate(const ProblemInstance& inst,
                                  const DataDistribution& dist,
                                  const SolverClosure& solver, int n, int R,
                                  std::uint64_t seed, int jobs) {
  std::vector<Vector> outputs;
  run_replicas(inst, dist, solver, n, R, seed, jobs, outputs, nullptr);
  return weak_gap_from_outputs(inst, outputs);
}

GeneralizationReport generalization_check(const ProblemInstance& inst,
                                          const DataDistribution& dist,
                                          const SolverClosure& solver, int n,
                                          int R, std::uint64_t seed,
                                          double delta_hat, double delta_se,
                                          int jobs) {
  std::vector<Vector> outputs;
  std::vector<double> emp;
  run_replicas(inst, dist, solver, n, R, seed, jobs, outputs, &emp);
  const WeakGapEstimate weak = weak_gap_from_outputs(inst, outputs);

  double mean = 0.0;
  for (double g : emp) mean += g;
  mean /= R;
  double ss = 0.0;
  for (double g : emp) ss += (g - mean) * (g - mean);
  const double emp_se = R > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;

  GeneralizationReport rep;
  rep.weak_gap = weak.estimate;
  rep.weak_se = weak.std_error;
  rep.emp_gap_mean = mean;
  rep.emp_gap_se = emp_se;
  rep.delta_hat = delta_hat;
  rep.delta_se = delta_se;
  const double combined =
      std::sqrt(weak.std_error * weak.std_error + emp_se * emp_se +
                inst.M * inst.M * delta_se * delta_se);
  rep.slack = mean + inst.M * delta_hat + 3.0 * combined - rep.weak_gap;
  rep.pass = rep.slack >= 0.0;
  return rep;
}

}  // namespace dpvi
