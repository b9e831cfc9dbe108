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

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dpvi/geometry.hpp"
#include "dpvi/rng.hpp"

namespace dpvi {

// Per-datapoint operator families. All families are affine in the payload,
// which keeps batch means exact and the population operator analytic.

enum class Family { kConstantOp, kBilinearSp, kQuadraticVi };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// F(w) = M * beta, independent of w. Coordinates of beta are +-1/sqrt(d).
struct ConstantPayload {
  Vector beta;
};

// f(x, y) = x'Ay + a'x + b'y with operator F(x, y) = (Ay + a, -A'x - b).
struct BilinearPayload {
  Matrix A;
  Vector a;
  Vector b;
};

// F(w) = Qw + c with x'Qx >= 0 for all x.
struct QuadraticPayload {
  Matrix Q;
  Vector c;
};

using Datapoint =
    std::variant<ConstantPayload, BilinearPayload, QuadraticPayload>;

struct Dataset {
  std::vector<Datapoint> points;
  int n() const { return static_cast<int>(points.size()); }
};

struct ProblemInstance {
  Family family = Family::kConstantOp;
  FeasibleSet set;
  double M = 0.0;  // operator bound over the set
  double L = 0.0;  // Lipschitz constant
  double D = 0.0;  // diameter of the set
  std::optional<Datapoint> population;  // analytic mean payload

  int dim() const { return set.dimension(); }
  // Dimension of the x-block for saddle-point instances.
  int primal_dim() const;
};

// Sampling laws. Declared (M, L) bounds hold surely for every draw.
struct ConstantOpLaw {
  int dim = 2;
  double M = 1.0;
  double bias = 0.5;  // P(coordinate = +1/sqrt(d))
};

struct BilinearLaw {
  BilinearPayload base;     // population mean
  double entry_noise = 0.0; // uniform half-width added to A entries
  double a_noise = 0.0;     // same for a
  double b_noise = 0.0;     // same for b
  double op_norm_cap = 1.0; // draws with larger ||A||_2 are rescaled
};

struct QuadraticLaw {
  int dim = 2;
  double op_norm_cap = 1.0;  // Lipschitz cap on ||Q||_2
  double c_halfwidth = 0.0;  // uniform half-width of c entries
  double skew_fraction = 0.0;  // relative weight of the skew part of Q
};

struct DataDistribution {
  Family family = Family::kConstantOp;
  std::variant<ConstantOpLaw, BilinearLaw, QuadraticLaw> law;
  ConstantOpLaw& constant_law() { return std::get<ConstantOpLaw>(law); }
  const ConstantOpLaw& constant_law() const { return std::get<ConstantOpLaw>(law); }
  BilinearLaw& bilinear_law() { return std::get<BilinearLaw>(law); }
  const BilinearLaw& bilinear_law() const { return std::get<BilinearLaw>(law); }
  QuadraticLaw& quadratic_law() { return std::get<QuadraticLaw>(law); }
  const QuadraticLaw& quadratic_law() const { return std::get<QuadraticLaw>(law); }
};

// --- Operator and saddle evaluation ---------------------------------------

void eval_datapoint_operator_into(const ProblemInstance& inst,
                                  const Datapoint& dp, const Vector& w,
                                  Vector& out);
Vector eval_datapoint_operator(const ProblemInstance& inst, const Datapoint& dp,
                               const Vector& w);

Vector eval_batch_operator(const ProblemInstance& inst,
                           const std::vector<Datapoint>& batch,
                           const Vector& w);
// Hot-path variant: batch given as indices into a dataset.
void eval_batch_operator_into(const ProblemInstance& inst, const Dataset& data,
                              std::span<const int> idx, const Vector& w,
                              Vector& out, Vector& scratch);

Vector eval_population_operator(const ProblemInstance& inst, const Vector& w);

// Saddle value for bilinear instances; throws for other families.
double eval_saddle(const ProblemInstance& inst, const Datapoint& dp,
                   const Vector& x, const Vector& y);
double eval_saddle_batch(const ProblemInstance& inst, const Dataset& data,
                         std::span<const int> idx, const Vector& x,
                         const Vector& y);
double eval_saddle_population(const ProblemInstance& inst, const Vector& x,
                              const Vector& y);

// Mean payload of a batch (affine families make this exact).
Datapoint mean_payload(const ProblemInstance& inst, const Dataset& data,
                       std::span<const int> idx);
Datapoint mean_payload(const ProblemInstance& inst, const Dataset& data);

// --- Sampling ---------------------------------------------------------------

// Exact payload equality; used to decide whether a replaced datapoint
// actually changes the operator.
bool datapoint_equal(const Datapoint& a, const Datapoint& b);

Datapoint sample_datapoint(const DataDistribution& dist, Rng& rng);
Dataset sample_dataset(const DataDistribution& dist, int n,
                       std::uint64_t seed);
Dataset make_neighbor(const Dataset& s, int i, Datapoint replacement);

// Builds an instance over `set` with constants (M, L, D) valid surely for
// every draw of `dist`, and the analytic population payload.
ProblemInstance make_instance(const DataDistribution& dist, FeasibleSet set);

// Largest singular value by power iteration; used as an independent check
// against the exact rescaling done at sampling time.
double op_norm_power_iteration(const Matrix& A, int iters = 200);

}  // namespace dpvi
