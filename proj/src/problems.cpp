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

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace dpvi {

std::string family_name(Family f) {
  switch (f) {
    case Family::kConstantOp: return "constant_op";
    case Family::kBilinearSp: return "bilinear_sp";
    case Family::kQuadraticVi: return "quadratic_vi";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "constant_op") return Family::kConstantOp;
  if (name == "bilinear_sp") return Family::kBilinearSp;
  if (name == "quadratic_vi") return Family::kQuadraticVi;
  throw std::invalid_argument("unknown family: " + name);
}

int ProblemInstance::primal_dim() const {
  if (family != Family::kBilinearSp)
    throw std::invalid_argument("primal_dim: not a saddle-point instance");
  const auto* prod = std::get_if<ProductSet>(&set.variant());
  if (prod == nullptr || prod->factors.size() != 2)
    throw std::invalid_argument("bilinear instance requires Product(X, Y) set");
  return prod->factors[0].dimension();
}

namespace {

void check_family(const ProblemInstance& inst, const Datapoint& dp) {
  const bool ok =
      (inst.family == Family::kConstantOp &&
       std::holds_alternative<ConstantPayload>(dp)) ||
      (inst.family == Family::kBilinearSp &&
       std::holds_alternative<BilinearPayload>(dp)) ||
      (inst.family == Family::kQuadraticVi &&
       std::holds_alternative<QuadraticPayload>(dp));
  if (!ok) throw std::invalid_argument("datapoint family does not match instance");
}

void check_w(const ProblemInstance& inst, const Vector& w) {
  if (w.size() != inst.dim())
    throw std::invalid_argument("operator argument has wrong dimension");
}

}  // namespace

void eval_datapoint_operator_into(const ProblemInstance& inst,
                                  const Datapoint& dp, const Vector& w,
                                  Vector& out) {
  check_family(inst, dp);
  check_w(inst, w);
  out.resize(inst.dim());
  if (const auto* c = std::get_if<ConstantPayload>(&dp)) {
    if (c->beta.size() != inst.dim())
      throw std::invalid_argument("constant payload dimension mismatch");
    out = inst.M * c->beta;
  } else if (const auto* b = std::get_if<BilinearPayload>(&dp)) {
    const int d1 = static_cast<int>(b->A.rows());
    const int d2 = static_cast<int>(b->A.cols());
    if (d1 + d2 != inst.dim())
      throw std::invalid_argument("bilinear payload dimension mismatch");
    out.head(d1).noalias() = b->A * w.tail(d2);
    out.head(d1) += b->a;
    out.tail(d2).noalias() = -(b->A.transpose() * w.head(d1));
    out.tail(d2) -= b->b;
  } else {
    const auto& q = std::get<QuadraticPayload>(dp);
    if (q.Q.rows() != inst.dim())
      throw std::invalid_argument("quadratic payload dimension mismatch");
    out.noalias() = q.Q * w;
    out += q.c;
  }
}

Vector eval_datapoint_operator(const ProblemInstance& inst, const Datapoint& dp,
                               const Vector& w) {
  Vector out;
  eval_datapoint_operator_into(inst, dp, w, out);
  return out;
}

Vector eval_batch_operator(const ProblemInstance& inst,
                           const std::vector<Datapoint>& batch,
                           const Vector& w) {
  if (batch.empty()) throw std::invalid_argument("eval_batch_operator: empty batch");
  Vector acc = Vector::Zero(inst.dim());
  Vector tmp;
  for (const auto& dp : batch) {
    eval_datapoint_operator_into(inst, dp, w, tmp);
    acc += tmp;
  }
  return acc / static_cast<double>(batch.size());
}

void eval_batch_operator_into(const ProblemInstance& inst, const Dataset& data,
                              std::span<const int> idx, const Vector& w,
                              Vector& out, Vector& scratch) {
  if (idx.empty()) throw std::invalid_argument("eval_batch_operator: empty batch");
  out.setZero(inst.dim());
  for (int i : idx) {
    eval_datapoint_operator_into(inst, data.points.at(i), w, scratch);
    out += scratch;
  }
  out /= static_cast<double>(idx.size());
}

Vector eval_population_operator(const ProblemInstance& inst, const Vector& w) {
  if (!inst.population.has_value())
    throw std::invalid_argument("population operator unavailable for this instance");
  return eval_datapoint_operator(inst, *inst.population, w);
}

double eval_saddle(const ProblemInstance& inst, const Datapoint& dp,
                   const Vector& x, const Vector& y) {
  check_family(inst, dp);
  const auto* b = std::get_if<BilinearPayload>(&dp);
  if (b == nullptr)
    throw std::invalid_argument("eval_saddle: only bilinear instances have a saddle value");
  return x.dot(b->A * y) + b->a.dot(x) + b->b.dot(y);
}

double eval_saddle_batch(const ProblemInstance& inst, const Dataset& data,
                         std::span<const int> idx, const Vector& x,
                         const Vector& y) {
  if (idx.empty()) throw std::invalid_argument("eval_saddle_batch: empty batch");
  double acc = 0.0;
  for (int i : idx) acc += eval_saddle(inst, data.points.at(i), x, y);
  return acc / static_cast<double>(idx.size());
}

double eval_saddle_population(const ProblemInstance& inst, const Vector& x,
                              const Vector& y) {
  if (!inst.population.has_value())
    throw std::invalid_argument("population saddle unavailable for this instance");
  return eval_saddle(inst, *inst.population, x, y);
}

Datapoint mean_payload(const ProblemInstance& inst, const Dataset& data,
                       std::span<const int> idx) {
  if (idx.empty()) throw std::invalid_argument("mean_payload: empty batch");
  const double inv = 1.0 / static_cast<double>(idx.size());
  switch (inst.family) {
    case Family::kConstantOp: {
      Vector beta = Vector::Zero(inst.dim());
      for (int i : idx)
        beta += std::get<ConstantPayload>(data.points.at(i)).beta;
      return ConstantPayload{beta * inv};
    }
    case Family::kBilinearSp: {
      const auto& first = std::get<BilinearPayload>(data.points.at(idx[0]));
      Matrix A = Matrix::Zero(first.A.rows(), first.A.cols());
      Vector a = Vector::Zero(first.a.size());
      Vector b = Vector::Zero(first.b.size());
      for (int i : idx) {
        const auto& p = std::get<BilinearPayload>(data.points.at(i));
        A += p.A;
        a += p.a;
        b += p.b;
      }
      return BilinearPayload{A * inv, a * inv, b * inv};
    }
    case Family::kQuadraticVi: {
      const auto& first = std::get<QuadraticPayload>(data.points.at(idx[0]));
      Matrix Q = Matrix::Zero(first.Q.rows(), first.Q.cols());
      Vector c = Vector::Zero(first.c.size());
      for (int i : idx) {
        const auto& p = std::get<QuadraticPayload>(data.points.at(i));
        Q += p.Q;
        c += p.c;
      }
      return QuadraticPayload{Q * inv, c * inv};
    }
  }
  throw std::logic_error("unreachable");
}

Datapoint mean_payload(const ProblemInstance& inst, const Dataset& data) {
  std::vector<int> idx(data.points.size());
  for (int i = 0; i < data.n(); ++i) idx[i] = i;
  return mean_payload(inst, data, idx);
}

namespace {

double exact_op_norm(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

Matrix capped(Matrix A, double cap) {
  const double s = exact_op_norm(A);
  if (s > cap && s > 0.0) A *= cap / s;
  return A;
}

}  // namespace

namespace {
bool exactly_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}
bool exactly_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}
}  // namespace

bool datapoint_equal(const Datapoint& a, const Datapoint& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ca = std::get_if<ConstantPayload>(&a)) {
    return exactly_equal(ca->beta, std::get<ConstantPayload>(b).beta);
  }
  if (const auto* ba = std::get_if<BilinearPayload>(&a)) {
    const auto& bb = std::get<BilinearPayload>(b);
    return exactly_equal(ba->A, bb.A) && exactly_equal(ba->a, bb.a) &&
           exactly_equal(ba->b, bb.b);
  }
  const auto& qa = std::get<QuadraticPayload>(a);
  const auto& qb = std::get<QuadraticPayload>(b);
  return exactly_equal(qa.Q, qb.Q) && exactly_equal(qa.c, qb.c);
}

Datapoint sample_datapoint(const DataDistribution& dist, Rng& rng) {
  switch (dist.family) {
    case Family::kConstantOp: {
      const auto& law = dist.constant_law();
      const double unit = 1.0 / std::sqrt(static_cast<double>(law.dim));
      Vector beta(law.dim);
      for (int i = 0; i < law.dim; ++i)
        beta[i] = unit * rng.rademacher(law.bias);
      return ConstantPayload{beta};
    }
    case Family::kBilinearSp: {
      const auto& law = dist.bilinear_law();
      Matrix A = law.base.A;
      for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
          A(i, j) += rng.uniform(-law.entry_noise, law.entry_noise);
      A = capped(std::move(A), law.op_norm_cap);
      Vector a = law.base.a;
      for (int i = 0; i < a.size(); ++i)
        a[i] += rng.uniform(-law.a_noise, law.a_noise);
      Vector b = law.base.b;
      for (int i = 0; i < b.size(); ++i)
        b[i] += rng.uniform(-law.b_noise, law.b_noise);
      return BilinearPayload{std::move(A), std::move(a), std::move(b)};
    }
    case Family::kQuadraticVi: {
      const auto& law = dist.quadratic_law();
      const int d = law.dim;
      Matrix G(d, d), H(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          G(i, j) = rng.normal();
          H(i, j) = rng.normal();
        }
      Matrix sym = capped(G.transpose() * G,
                          (1.0 - law.skew_fraction) * law.op_norm_cap);
      Matrix skew = capped(0.5 * (H - H.transpose()),
                           law.skew_fraction * law.op_norm_cap);
      Vector c(d);
      for (int i = 0; i < d; ++i)
        c[i] = rng.uniform(-law.c_halfwidth, law.c_halfwidth);
      return QuadraticPayload{sym + skew, std::move(c)};
    }
  }
  throw std::logic_error("unreachable");
}

Dataset sample_dataset(const DataDistribution& dist, int n,
                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  Rng rng(derive_seed(seed, 0x5A17));
  Dataset out;
  out.points.reserve(n);
  for (int i = 0; i < n; ++i) out.points.push_back(sample_datapoint(dist, rng));
  return out;
}

Dataset make_neighbor(const Dataset& s, int i, Datapoint replacement) {
  if (i < 0 || i >= s.n())
    throw std::invalid_argument("make_neighbor: index out of range");
  Dataset out = s;
  out.points[i] = std::move(replacement);
  return out;
}

namespace {

// Largest norm of a point of the set; used for sure operator bounds.
double max_point_norm(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s.center.norm() + s.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          double sq = 0.0;
          for (int i = 0; i < s.lower.size(); ++i)
            sq += std::pow(std::max(std::abs(s.lower[i]), std::abs(s.upper[i])), 2);
          return std::sqrt(sq);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return s.scale;
        } else {
          double sq = 0.0;
          for (const auto& f : s.factors) sq += std::pow(max_point_norm(f), 2);
          return std::sqrt(sq);
        }
      },
      set.variant());
}

// Sure bound on max_{y in Y} ||A y + a|| for all draws of the law, where A
// entries live in [base - eA, base + eA] and a entries in [base - ea, base + ea].
// Simplex factors get the exact vertex/corner enumeration, other sets a norm
// bound using the op-norm cap.
double affine_block_bound(const FeasibleSet& Y, const Matrix& baseA, double eA,
                          const Vector& basea, double ea, double op_cap) {
  if (const auto* sx = std::get_if<Simplex>(&Y.variant())) {
    double best = 0.0;
    for (int j = 0; j < baseA.cols(); ++j) {
      double sq = 0.0;
      for (int i = 0; i < baseA.rows(); ++i) {
        const double lo = sx->scale * (baseA(i, j) - eA) + basea[i] - ea;
        const double hi = sx->scale * (baseA(i, j) + eA) + basea[i] + ea;
        sq += std::pow(std::max(std::abs(lo), std::abs(hi)), 2);
      }
      best = std::max(best, std::sqrt(sq));
    }
    return best;
  }
  const double amax =
      basea.norm() + ea * std::sqrt(static_cast<double>(basea.size()));
  return op_cap * max_point_norm(Y) + amax;
}

}  // namespace

ProblemInstance make_instance(const DataDistribution& dist, FeasibleSet set) {
  ProblemInstance inst{dist.family, std::move(set), 0.0, 0.0, 0.0, std::nullopt};
  inst.D = diameter(inst.set);
  switch (dist.family) {
    case Family::kConstantOp: {
      const auto& law = dist.constant_law();
      if (inst.set.dimension() != law.dim)
        throw std::invalid_argument("set dimension does not match law");
      inst.M = law.M;
      inst.L = 0.0;
      const double mean = (2.0 * law.bias - 1.0) / std::sqrt(law.dim);
      inst.population = ConstantPayload{Vector::Constant(law.dim, mean)};
      break;
    }
    case Family::kBilinearSp: {
      const auto& law = dist.bilinear_law();
      const auto* prod = std::get_if<ProductSet>(&inst.set.variant());
      if (prod == nullptr || prod->factors.size() != 2)
        throw std::invalid_argument("bilinear instance requires Product(X, Y) set");
      const FeasibleSet& X = prod->factors[0];
      const FeasibleSet& Y = prod->factors[1];
      if (X.dimension() != law.base.A.rows() || Y.dimension() != law.base.A.cols())
        throw std::invalid_argument("set block dimensions do not match payload");
      inst.L = law.op_norm_cap;
      const double mx = affine_block_bound(Y, law.base.A, law.entry_noise,
                                           law.base.a, law.a_noise, law.op_norm_cap);
      const double my = affine_block_bound(X, law.base.A.transpose(), law.entry_noise,
                                           law.base.b, law.b_noise, law.op_norm_cap);
      inst.M = std::sqrt(mx * mx + my * my);
      inst.population = law.base;
      break;
    }
    case Family::kQuadraticVi: {
      const auto& law = dist.quadratic_law();
      if (inst.set.dimension() != law.dim)
        throw std::invalid_argument("set dimension does not match law");
      inst.L = law.op_norm_cap;
      inst.M = law.op_norm_cap * max_point_norm(inst.set) +
               law.c_halfwidth * std::sqrt(static_cast<double>(law.dim));
      inst.population = std::nullopt;  // mean of Q draws has no closed form here
      break;
    }
  }
  return inst;
}

double op_norm_power_iteration(const Matrix& A, int iters) {
  const int n = static_cast<int>(A.cols());
  Vector v = Vector::Ones(n);
  for (int i = 0; i < n; ++i) v[i] += 1e-3 * (i + 1) / n;  // break ties
  v.normalize();
  const Matrix AtA = A.transpose() * A;
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector next = AtA * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    v = next / norm;
    lambda = norm;
  }
  return std::sqrt(lambda);
}

}  // namespace dpvi
