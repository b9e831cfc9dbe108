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

#include <cstdint>
#include <initializer_list>

#include <Eigen/Core>

namespace dpvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// SplitMix64 step; used for seeding and for seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministically derives a child seed from a master seed and a stream id.
// Replicas, noise slots and sampling streams each get their own id so that
// coupled runs can share randomness exactly.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id1,
                          std::uint64_t id2);

// xoshiro256++ with explicit Box-Muller normals. All draws are pure functions
// of the seed and the call sequence, independent of the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  // One standard normal per call (Box-Muller, no cached second value).
  double normal();
  // d independent N(0, stddev^2) coordinates.
  Vector normal_vector(int dim, double stddev);

  // +1 with probability p_plus, else -1.
  int rademacher(double p_plus = 0.5);

 private:
  std::uint64_t s_[4];
};

}  // namespace dpvi
