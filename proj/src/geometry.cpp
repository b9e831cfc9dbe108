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

#include "dpvi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace dpvi {

namespace {

void check_dim(const FeasibleSet& set, const Vector& p, const char* what) {
  if (p.size() != set.dimension()) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(set.dimension()) + ", got " +
                                std::to_string(p.size()));
  }
}

// Sort-and-threshold projection onto {x >= 0, sum(x) = scale}. Ties in the
// descending sort are broken by index; the projection itself is unique.
void project_simplex(double scale, Vector& p) {
  const int n = static_cast<int>(p.size());
  std::vector<double> u(p.data(), p.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  int rho = 0;
  double rho_cumsum = 0.0;
  for (int j = 0; j < n; ++j) {
    cumsum += u[j];
    if (u[j] - (cumsum - scale) / (j + 1) > 0.0) {
      rho = j + 1;
      rho_cumsum = cumsum;
    }
  }
  tau = (rho_cumsum - scale) / rho;
  for (int i = 0; i < n; ++i) p[i] = std::max(p[i] - tau, 0.0);
}

}  // namespace

FeasibleSet::FeasibleSet(Variant v) : v_(std::move(v)) {
  std::visit(
      [this](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          if (!(s.radius > 0.0)) throw std::invalid_argument("Ball: radius must be positive");
          dim_ = static_cast<int>(s.center.size());
        } else if constexpr (std::is_same_v<T, Box>) {
          if (s.lower.size() != s.upper.size())
            throw std::invalid_argument("Box: bound dimensions differ");
          for (int i = 0; i < s.lower.size(); ++i)
            if (s.lower[i] > s.upper[i])
              throw std::invalid_argument("Box: lower > upper at coordinate " + std::to_string(i));
          dim_ = static_cast<int>(s.lower.size());
        } else if constexpr (std::is_same_v<T, Simplex>) {
          if (s.dim < 1) throw std::invalid_argument("Simplex: dim must be positive");
          if (!(s.scale > 0.0)) throw std::invalid_argument("Simplex: scale must be positive");
          dim_ = s.dim;
        } else {
          if (s.factors.empty()) throw std::invalid_argument("Product: needs at least one factor");
          int d = 0;
          for (const auto& f : s.factors) d += f.dimension();
          dim_ = d;
        }
      },
      v_);
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  return FeasibleSet(Ball{std::move(center), radius});
}
FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  return FeasibleSet(Box{std::move(lower), std::move(upper)});
}
FeasibleSet FeasibleSet::simplex(int dim, double scale) {
  return FeasibleSet(Simplex{dim, scale});
}
FeasibleSet FeasibleSet::product(std::vector<FeasibleSet> factors) {
  return FeasibleSet(ProductSet{std::move(factors)});
}

void project_in_place(const FeasibleSet& set, Vector& p) {
  check_dim(set, p, "project");
  std::visit(
      [&p](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const double d = (p - s.center).norm();
          if (d > s.radius) p = s.center + (s.radius / d) * (p - s.center);
        } else if constexpr (std::is_same_v<T, Box>) {
          for (int i = 0; i < p.size(); ++i)
            p[i] = std::clamp(p[i], s.lower[i], s.upper[i]);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          project_simplex(s.scale, p);
        } else {
          int off = 0;
          for (const auto& f : s.factors) {
            Vector block = p.segment(off, f.dimension());
            project_in_place(f, block);
            p.segment(off, f.dimension()) = block;
            off += f.dimension();
          }
        }
      },
      set.variant());
}

Vector project(const FeasibleSet& set, const Vector& p) {
  Vector q = p;
  project_in_place(set, q);
  return q;
}

SupportResult support_max(const FeasibleSet& set, const Vector& g) {
  check_dim(set, g, "support_max");
  SupportResult r;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const double gn = g.norm();
          if (gn == 0.0) {
            r.point = s.center;
          } else {
            r.point = s.center + (s.radius / gn) * g;
          }
          r.value = g.dot(s.center) + s.radius * gn;
        } else if constexpr (std::is_same_v<T, Box>) {
          r.point.resize(g.size());
          for (int i = 0; i < g.size(); ++i)
            r.point[i] = g[i] > 0.0 ? s.upper[i] : s.lower[i];
          r.value = g.dot(r.point);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          int best = 0;
          for (int i = 1; i < s.dim; ++i)
            if (g[i] > g[best]) best = i;
          r.point = Vector::Zero(s.dim);
          r.point[best] = s.scale;
          r.value = s.scale * g[best];
        } else {
          r.point.resize(g.size());
          r.value = 0.0;
          int off = 0;
          for (const auto& f : s.factors) {
            SupportResult sub = support_max(f, g.segment(off, f.dimension()));
            r.point.segment(off, f.dimension()) = sub.point;
            r.value += sub.value;
            off += f.dimension();
          }
        }
      },
      set.variant());
  return r;
}

double diameter(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return 2.0 * s.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          return (s.upper - s.lower).norm();
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return s.dim == 1 ? 0.0 : s.scale * std::sqrt(2.0);
        } else {
          double sq = 0.0;
          for (const auto& f : s.factors) {
            const double d = diameter(f);
            sq += d * d;
          }
          return std::sqrt(sq);
        }
      },
      set.variant());
}

double dist(const FeasibleSet& set, const Vector& p) {
  return (p - project(set, p)).norm();
}

bool contains(const FeasibleSet& set, const Vector& p, double tol) {
  if (p.size() != set.dimension()) return false;
  return dist(set, p) <= tol;
}

Box bounding_box(const FeasibleSet& set) {
  return std::visit(
      [&set](const auto& s) -> Box {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return Box{s.center.array() - s.radius, s.center.array() + s.radius};
        } else if constexpr (std::is_same_v<T, Box>) {
          return s;
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return Box{Vector::Zero(s.dim), Vector::Constant(s.dim, s.scale)};
        } else {
          Box out{Vector(set.dimension()), Vector(set.dimension())};
          int off = 0;
          for (const auto& f : s.factors) {
            Box sub = bounding_box(f);
            out.lower.segment(off, f.dimension()) = sub.lower;
            out.upper.segment(off, f.dimension()) = sub.upper;
            off += f.dimension();
          }
          return out;
        }
      },
      set.variant());
}

Vector sample_point(const FeasibleSet& set, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const int d = static_cast<int>(s.center.size());
          Vector g = rng.normal_vector(d, 1.0);
          const double gn = g.norm();
          if (gn == 0.0) return s.center;
          const double r = s.radius * std::pow(rng.uniform(), 1.0 / d);
          return s.center + (r / gn) * g;
        } else if constexpr (std::is_same_v<T, Box>) {
          Vector p(s.lower.size());
          for (int i = 0; i < p.size(); ++i)
            p[i] = rng.uniform(s.lower[i], s.upper[i]);
          return p;
        } else if constexpr (std::is_same_v<T, Simplex>) {
          // Dirichlet(1,...,1) via exponential spacings.
          Vector p(s.dim);
          double sum = 0.0;
          for (int i = 0; i < s.dim; ++i) {
            p[i] = -std::log(1.0 - rng.uniform());
            sum += p[i];
          }
          return (s.scale / sum) * p;
        } else {
          Vector p(0);
          Vector out(0);
          int total = 0;
          for (const auto& f : s.factors) total += f.dimension();
          out.resize(total);
          int off = 0;
          for (const auto& f : s.factors) {
            out.segment(off, f.dimension()) = sample_point(f, rng);
            off += f.dimension();
          }
          return out;
        }
      },
      set.variant());
}

}  // namespace dpvi
