// Copyright 2026 The noisyht authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOISYHT_RNG_HPP
#define NOISYHT_RNG_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>

namespace noisyht {

// Philox4x32-10 (Salmon et al., SC 2011). Every output block is a pure
// function of (key, counter); we key by (seed, stream) and treat the low
// counter words as the sample index. Parallel and serial runs therefore
// produce identical draws.
struct Philox {
  static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  static constexpr std::uint32_t kMultA = 0xD2511F53u;
  static constexpr std::uint32_t kMultB = 0xCD9E8D57u;

  static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t counter) {
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    std::array<std::uint32_t, 4> c = {
        static_cast<std::uint32_t>(counter),
        static_cast<std::uint32_t>(counter >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(stream >> 32)};
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMultA) * c[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMultB) * c[2];
      const std::array<std::uint32_t, 4> next = {
          static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
          static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
          static_cast<std::uint32_t>(p0)};
      c = next;
      k0 += kWeylA;
      k1 += kWeylB;
    }
    return c;
  }
};

/// Stateful convenience wrapper over the stateless Philox block function.
/// Draw i on stream s of seed k is reproducible no matter how the draws
/// are chunked across threads or runs.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

  std::uint64_t next_u64() {
    const auto b = Philox::block(seed_, stream_, counter_++);
    return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Categorical sample from an unnormalized non-negative weight vector
  /// (any Eigen vector expression, row or column).
  template <typename Derived>
  int sample(const Eigen::DenseBase<Derived>& weights) {
    const double u = next_double() * weights.sum();
    double acc = 0.0;
    const int n = static_cast<int>(weights.size());
    for (int i = 0; i < n - 1; ++i) {
      acc += weights(i);
      if (u < acc) return i;
    }
    return n - 1;
  }

  /// Dirichlet(1,...,1) point on the k-simplex via normalized exponentials.
  Eigen::VectorXd simplex_point(int k) {
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) {
      v(i) = -std::log(1.0 - next_double());
    }
    return v / v.sum();
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace noisyht

#endif  // NOISYHT_RNG_HPP
