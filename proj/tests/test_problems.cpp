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

#include "dpvi/problems.hpp"

#include <cmath>
#include <doctest.h>

#include "test_oracles.hpp"

using namespace dpvi;
namespace dt = dpvi::testing;

namespace {

ProblemInstance identity_bilinear_instance() {
  BilinearLaw law;
  law.base = BilinearPayload{Matrix::Identity(2, 2), Vector::Zero(2),
                             Vector::Zero(2)};
  law.op_norm_cap = 1.0;
  DataDistribution dist{Family::kBilinearSp, law};
  std::vector<FeasibleSet> factors;
  factors.push_back(FeasibleSet::ball(Vector::Zero(2), 2.0));
  factors.push_back(FeasibleSet::ball(Vector::Zero(2), 2.0));
  return make_instance(dist, FeasibleSet::product(std::move(factors)));
}

}  // namespace

TEST_CASE("datapoint operator pinned examples") {
  // Bilinear with A = I, a = b = 0 at (e1, e2): F = (A y + a, -A'x - b).
  const ProblemInstance bil = identity_bilinear_instance();
  Vector w(4);
  w << 1, 0, 0, 1;  // x = e1, y = e2
  const Vector f = eval_datapoint_operator(
      bil, BilinearPayload{Matrix::Identity(2, 2), Vector::Zero(2), Vector::Zero(2)}, w);
  Vector expected(4);
  expected << 0, 1, -1, 0;  // (e2, -e1)
  CHECK((f - expected).norm() < 1e-15);

  // Constant operator: M beta independent of w.
  const ProblemInstance cop = dt::constant_op_instance(2, 1.0, 1.0, 0.5);
  Vector beta(2);
  beta << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Vector f1 = eval_datapoint_operator(cop, ConstantPayload{beta}, Vector::Zero(2));
  Vector w2(2);
  w2 << 0.3, -0.4;
  const Vector f2 = eval_datapoint_operator(cop, ConstantPayload{beta}, w2);
  CHECK((f1 - beta).norm() < 1e-15);
  CHECK((f1 - f2).norm() == 0.0);

  // Quadratic identity map.
  const ProblemInstance quad =
      make_instance(dt::quadratic_law(2, 1.0, 0.0, 0.0),
                    FeasibleSet::ball(Vector::Zero(2), 10.0));
  Vector w3(2);
  w3 << 3, 4;
  const Vector f3 = eval_datapoint_operator(
      quad, QuadraticPayload{Matrix::Identity(2, 2), Vector::Zero(2)}, w3);
  CHECK((f3 - w3).norm() < 1e-15);
}

TEST_CASE("family and dimension mismatches are rejected") {
  const ProblemInstance cop = dt::constant_op_instance(2, 1.0, 1.0, 0.5);
  CHECK_THROWS_AS(eval_datapoint_operator(
                      cop, QuadraticPayload{Matrix::Identity(2, 2), Vector::Zero(2)},
                      Vector::Zero(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(eval_datapoint_operator(cop, ConstantPayload{Vector::Zero(2)},
                                          Vector::Zero(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(eval_batch_operator(cop, {}, Vector::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("batch operator is the arithmetic mean") {
  const ProblemInstance cop = dt::constant_op_instance(2, 1.0, 1.0, 0.5);
  Vector beta(2);
  beta << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  const Datapoint p1 = ConstantPayload{beta};
  const Datapoint p2 = ConstantPayload{Vector(-beta)};

  const Vector single = eval_batch_operator(cop, {p1}, Vector::Zero(2));
  CHECK((single - eval_datapoint_operator(cop, p1, Vector::Zero(2))).norm() == 0.0);

  const Vector cancel = eval_batch_operator(cop, {p1, p2}, Vector::Zero(2));
  CHECK(cancel.norm() == 0.0);

  // Bilinear batch mean equals the operator of the averaged payload.
  const ProblemInstance bil = identity_bilinear_instance();
  Rng rng(7);
  Dataset data = sample_dataset(dt::matching_pennies_law(0.3), 5, 99);
  const ProblemInstance mp = dt::matching_pennies_instance(0.3);
  Vector w(4);
  w << 0.2, 0.8, 0.5, 0.5;
  std::vector<int> idx{0, 1, 2, 3, 4};
  Vector out, scratch;
  eval_batch_operator_into(mp, data, idx, w, out, scratch);
  const Vector via_mean =
      eval_datapoint_operator(mp, mean_payload(mp, data, idx), w);
  CHECK((out - via_mean).norm() < 1e-12);
}

TEST_CASE("population operator examples and Monte-Carlo agreement") {
  // Symmetric constant-op law has zero population operator.
  const ProblemInstance cop = dt::constant_op_instance(2, 1.0, 1.0, 0.5);
  CHECK(eval_population_operator(cop, Vector::Zero(2)).norm() == 0.0);

  // Empirical mean approaches the analytic population operator: the oracle
  // here is a large-sample Monte-Carlo average.
  const ProblemInstance biased = dt::constant_op_instance(2, 1.0, 1.0, 0.75);
  const int n = 100000;
  const Dataset big = sample_dataset(dt::constant_op_law(2, 1.0, 0.75), n, 5);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Vector emp, scratch;
  eval_batch_operator_into(biased, big, idx, Vector::Zero(2), emp, scratch);
  const Vector pop = eval_population_operator(biased, Vector::Zero(2));
  // Per-coordinate standard error of a +-1/sqrt(2) Rademacher(0.75) mean.
  const double coord_sd = std::sqrt(4.0 * 0.75 * 0.25 / 2.0);
  const double se = coord_sd / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < 2; ++i) CHECK(std::abs(emp[i] - pop[i]) <= 3.0 * se);

  const ProblemInstance quad =
      make_instance(dt::quadratic_law(2, 1.0, 0.5, 0.2),
                    FeasibleSet::ball(Vector::Zero(2), 1.0));
  CHECK_THROWS_AS(eval_population_operator(quad, Vector::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("saddle value examples") {
  const ProblemInstance bil = identity_bilinear_instance();
  const Datapoint dp = BilinearPayload{Matrix::Identity(2, 2), Vector::Zero(2),
                                       Vector::Zero(2)};
  Vector e1(2);
  e1 << 1, 0;
  CHECK(eval_saddle(bil, dp, e1, e1) == doctest::Approx(1.0));

  const ProblemInstance cop = dt::constant_op_instance(2, 1.0, 1.0, 0.5);
  CHECK_THROWS_AS(eval_saddle(cop, ConstantPayload{Vector::Zero(2)}, e1, e1),
                  std::invalid_argument);

  // Batch mean of values equals the value at the mean payload (affinity).
  const ProblemInstance mp = dt::matching_pennies_instance(0.3);
  const Dataset data = sample_dataset(dt::matching_pennies_law(0.3), 6, 42);
  std::vector<int> idx{0, 1, 2, 3, 4, 5};
  Vector x(2), y(2);
  x << 0.3, 0.7;
  y << 0.6, 0.4;
  double direct = 0.0;
  for (int i : idx) direct += eval_saddle(mp, data.points[i], x, y);
  direct /= idx.size();
  CHECK(eval_saddle_batch(mp, data, idx, x, y) == doctest::Approx(direct));
}

TEST_CASE("saddle differences match the line integral of the gradient field") {
  // f(x,y) - f(x',y') reproduced by quadrature of <grad f, direction> along
  // the segment; the gradient field is (A y + a, A'x + b).
  const ProblemInstance mp = dt::matching_pennies_instance(0.3);
  const Dataset data = sample_dataset(dt::matching_pennies_law(0.3), 3, 17);
  const auto& payload = std::get<BilinearPayload>(data.points[1]);
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    Vector z0(4), z1(4);
    for (int i = 0; i < 4; ++i) {
      z0[i] = rng.uniform(0.0, 1.0);
      z1[i] = rng.uniform(0.0, 1.0);
    }
    auto grad = [&](const Vector& z) {
      Vector g(4);
      g.head(2) = payload.A * z.tail(2) + payload.a;
      g.tail(2) = payload.A.transpose() * z.head(2) + payload.b;
      return g;
    };
    // Composite Simpson quadrature along the segment.
    const int segs = 64;
    double integral = 0.0;
    const Vector dzv = z1 - z0;
    for (int s = 0; s < segs; ++s) {
      const double t0 = static_cast<double>(s) / segs;
      const double t1 = static_cast<double>(s + 1) / segs;
      const double tm = 0.5 * (t0 + t1);
      const double f0 = grad(z0 + t0 * dzv).dot(dzv);
      const double fm = grad(z0 + tm * dzv).dot(dzv);
      const double f1 = grad(z0 + t1 * dzv).dot(dzv);
      integral += (t1 - t0) / 6.0 * (f0 + 4.0 * fm + f1);
    }
    const double diff =
        eval_saddle(mp, data.points[1], z1.head(2), z1.tail(2)) -
        eval_saddle(mp, data.points[1], z0.head(2), z0.tail(2));
    CHECK(std::abs(diff - integral) < 1e-6);
  }
}

TEST_CASE("bilinear operator components are the saddle gradients") {
  const ProblemInstance mp = dt::matching_pennies_instance(0.3);
  const Dataset data = sample_dataset(dt::matching_pennies_law(0.3), 2, 3);
  const Datapoint& dp = data.points[0];
  Rng rng(31);
  const double h = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    Vector z(4);
    for (int i = 0; i < 4; ++i) z[i] = rng.uniform(0.0, 1.0);
    const Vector f = eval_datapoint_operator(mp, dp, z);
    for (int i = 0; i < 4; ++i) {
      Vector zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const double num =
          (eval_saddle(mp, dp, zp.head(2), zp.tail(2)) -
           eval_saddle(mp, dp, zm.head(2), zm.tail(2))) /
          (2.0 * h);
      const double expected = i < 2 ? f[i] : -f[i];  // sign flip on y block
      CHECK(num == doctest::Approx(expected).epsilon(1e-6));
    }
  }
}

TEST_CASE("dataset sampling is deterministic and respects declared bounds") {
  const auto law = dt::matching_pennies_law(0.5);
  const Dataset a = sample_dataset(law, 20, 77);
  const Dataset b = sample_dataset(law, 20, 77);
  REQUIRE(a.n() == b.n());
  for (int i = 0; i < a.n(); ++i) CHECK(datapoint_equal(a.points[i], b.points[i]));

  // Operator-norm cap enforced surely; checked by power iteration.
  const double cap = law.bilinear_law().op_norm_cap;
  for (const auto& dp : a.points) {
    const auto& p = std::get<BilinearPayload>(dp);
    CHECK(op_norm_power_iteration(p.A) <= cap + 1e-9);
  }
}

TEST_CASE("constant-op empirical mean vanishes at the symmetric law") {
  const int n = 10000, d = 2;
  const Dataset data = sample_dataset(dt::constant_op_law(d, 1.0, 0.5), n, 15);
  Vector mean = Vector::Zero(d);
  for (const auto& dp : data.points) mean += std::get<ConstantPayload>(dp).beta;
  mean /= n;
  for (int i = 0; i < d; ++i)
    CHECK(std::abs(mean[i]) <= 4.0 / std::sqrt(static_cast<double>(n * d)));
}

TEST_CASE("make_neighbor semantics") {
  const Dataset data = sample_dataset(dt::constant_op_law(2, 1.0, 0.5), 10, 1);
  const Dataset same = make_neighbor(data, 3, data.points[3]);
  for (int i = 0; i < 10; ++i) CHECK(datapoint_equal(same.points[i], data.points[i]));

  Vector beta(2);
  beta << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Dataset other = make_neighbor(data, 3, ConstantPayload{beta});
  int differing = 0;
  for (int i = 0; i < 10; ++i)
    differing += !datapoint_equal(other.points[i], data.points[i]);
  CHECK(differing <= 1);
  CHECK_THROWS_AS(make_neighbor(data, 10, ConstantPayload{beta}),
                  std::invalid_argument);

  // Averaging a single replaced entry moves the empirical operator by at
  // most 2M/n.
  const ProblemInstance cop = dt::constant_op_instance(2, 1.0, 1.0, 0.5);
  std::vector<int> idx(10);
  for (int i = 0; i < 10; ++i) idx[i] = i;
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    const Vector w = sample_point(cop.set, rng);
    Vector fa, fb, scratch;
    eval_batch_operator_into(cop, data, idx, w, fa, scratch);
    eval_batch_operator_into(cop, other, idx, w, fb, scratch);
    CHECK((fa - fb).norm() <= 2.0 * cop.M / 10 + 1e-12);
  }
}

TEST_CASE("declared M and L hold on random draws") {
  Rng rng(111);
  const std::vector<std::pair<ProblemInstance, DataDistribution>> cases = {
      {dt::constant_op_instance(3, 2.0, 1.5, 0.6), dt::constant_op_law(3, 2.0, 0.6)},
      {dt::matching_pennies_instance(0.4), dt::matching_pennies_law(0.4)},
      {make_instance(dt::quadratic_law(3, 1.2, 0.5, 0.3),
                     FeasibleSet::ball(Vector::Zero(3), 1.0)),
       dt::quadratic_law(3, 1.2, 0.5, 0.3)},
  };
  for (const auto& [inst, law] : cases) {
    const Dataset data = sample_dataset(law, 100, 13);
    for (int trial = 0; trial < 10000; ++trial) {
      const auto& dp = data.points[rng.uniform_index(data.n())];
      const Vector w1 = sample_point(inst.set, rng);
      const Vector w2 = sample_point(inst.set, rng);
      const Vector f1 = eval_datapoint_operator(inst, dp, w1);
      const Vector f2 = eval_datapoint_operator(inst, dp, w2);
      CHECK(f1.norm() <= inst.M + 1e-9);
      CHECK((f1 - f2).norm() <= inst.L * (w1 - w2).norm() + 1e-9);
      // Monotonicity.
      CHECK((f1 - f2).dot(w1 - w2) >= -1e-10);
    }
  }
}

TEST_CASE("instance diameter matches the set") {
  const ProblemInstance mp = dt::matching_pennies_instance(0.0);
  CHECK(mp.D == doctest::Approx(diameter(mp.set)));
  CHECK(mp.primal_dim() == 2);
}
