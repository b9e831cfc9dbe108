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

// Test-only oracles, deliberately independent of the library's closed forms:
// projections by exhaustive active-set enumeration of the KKT system, and
// random set/instance generators shared by the unit and acceptance suites.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "dpvi/geometry.hpp"
#include "dpvi/problems.hpp"

namespace dpvi::testing {

// Exhaustive active-set projection. Ball: the constraint is active or not.
// Box: every coordinate is at its lower bound, free, or at its upper bound.
// Simplex: enumerate all nonempty supports and solve the equality-constrained
// system on each. Product: concatenation of factor oracles.
inline Vector project_oracle(const FeasibleSet& set, const Vector& p) {
  struct Best {
    double dist2 = std::numeric_limits<double>::infinity();
    Vector point;
    void offer(const Vector& w, const Vector& p) {
      const double d2 = (w - p).squaredNorm();
      if (d2 < dist2) {
        dist2 = d2;
        point = w;
      }
    }
  };
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        Best best;
        if constexpr (std::is_same_v<T, Ball>) {
          if ((p - s.center).norm() <= s.radius) best.offer(p, p);
          const Vector dir = p - s.center;
          const double nrm = dir.norm();
          if (nrm > 0.0) best.offer(s.center + (s.radius / nrm) * dir, p);
          else best.offer(s.center, p);
        } else if constexpr (std::is_same_v<T, Box>) {
          const int d = static_cast<int>(p.size());
          std::vector<int> state(d, 0);  // 0 = lower, 1 = free, 2 = upper
          while (true) {
            Vector w(d);
            bool ok = true;
            for (int i = 0; i < d && ok; ++i) {
              if (state[i] == 0) w[i] = s.lower[i];
              else if (state[i] == 2) w[i] = s.upper[i];
              else {
                w[i] = p[i];
                ok = p[i] >= s.lower[i] - 1e-12 && p[i] <= s.upper[i] + 1e-12;
              }
            }
            if (ok) best.offer(w, p);
            int axis = 0;
            while (axis < d && ++state[axis] == 3) state[axis++] = 0;
            if (axis == d) break;
          }
        } else if constexpr (std::is_same_v<T, Simplex>) {
          const int d = s.dim;
          for (unsigned mask = 1; mask < (1u << d); ++mask) {
            int size = 0;
            double sum = 0.0;
            for (int i = 0; i < d; ++i)
              if (mask & (1u << i)) {
                ++size;
                sum += p[i];
              }
            const double tau = (sum - s.scale) / size;
            Vector w = Vector::Zero(d);
            bool ok = true;
            for (int i = 0; i < d && ok; ++i)
              if (mask & (1u << i)) {
                w[i] = p[i] - tau;
                ok = w[i] >= -1e-12;
              }
            if (ok) {
              for (int i = 0; i < d; ++i) w[i] = std::max(w[i], 0.0);
              best.offer(w, p);
            }
          }
        } else {
          Vector w(p.size());
          int off = 0;
          for (const auto& f : s.factors) {
            w.segment(off, f.dimension()) =
                project_oracle(f, p.segment(off, f.dimension()));
            off += f.dimension();
          }
          return w;
        }
        return best.point;
      },
      set.variant());
}

// Random set over a handful of shapes, dimension <= max_dim.
inline FeasibleSet random_set(Rng& rng, int max_dim, bool allow_product = true) {
  const int kind = static_cast<int>(rng.uniform_index(allow_product ? 4 : 3));
  const int d = 1 + static_cast<int>(rng.uniform_index(max_dim));
  switch (kind) {
    case 0: {
      Vector c(d);
      for (int i = 0; i < d; ++i) c[i] = rng.uniform(-1.0, 1.0);
      return FeasibleSet::ball(c, rng.uniform(0.2, 2.0));
    }
    case 1: {
      Vector lo(d), hi(d);
      for (int i = 0; i < d; ++i) {
        lo[i] = rng.uniform(-2.0, 0.5);
        hi[i] = lo[i] + rng.uniform(0.0, 2.0);
      }
      return FeasibleSet::box(lo, hi);
    }
    case 2: {
      const int sd = std::max(2, d);
      return FeasibleSet::simplex(sd, rng.uniform(0.5, 2.0));
    }
    default: {
      std::vector<FeasibleSet> factors;
      const int k = 2 + static_cast<int>(rng.uniform_index(2));
      for (int i = 0; i < k; ++i)
        factors.push_back(random_set(rng, std::max(1, max_dim / k), false));
      return FeasibleSet::product(std::move(factors));
    }
  }
}

// Matching-pennies base game, optionally with entry noise in the law.
inline DataDistribution matching_pennies_law(double entry_noise = 0.0) {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  BilinearLaw law;
  law.base = BilinearPayload{A, Vector::Zero(2), Vector::Zero(2)};
  law.entry_noise = entry_noise;
  law.op_norm_cap = 2.0 + 2.0 * entry_noise;
  DataDistribution dist;
  dist.family = Family::kBilinearSp;
  dist.law = law;
  return dist;
}

inline ProblemInstance matching_pennies_instance(double entry_noise = 0.0) {
  std::vector<FeasibleSet> factors;
  factors.push_back(FeasibleSet::simplex(2, 1.0));
  factors.push_back(FeasibleSet::simplex(2, 1.0));
  return make_instance(matching_pennies_law(entry_noise),
                       FeasibleSet::product(std::move(factors)));
}

inline DataDistribution constant_op_law(int dim, double M, double bias) {
  DataDistribution dist;
  dist.family = Family::kConstantOp;
  dist.law = ConstantOpLaw{dim, M, bias};
  return dist;
}

inline ProblemInstance constant_op_instance(int dim, double M, double radius,
                                            double bias) {
  return make_instance(constant_op_law(dim, M, bias),
                       FeasibleSet::ball(Vector::Zero(dim), radius));
}

inline DataDistribution quadratic_law(int dim, double cap, double c_halfwidth,
                                      double skew) {
  DataDistribution dist;
  dist.family = Family::kQuadraticVi;
  dist.law = QuadraticLaw{dim, cap, c_halfwidth, skew};
  return dist;
}

}  // namespace dpvi::testing
