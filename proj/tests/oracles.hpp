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
//
// Test-only oracles and generators. These stay independent of the library
// paths they check: closed forms are evaluated from first principles and
// the brute-force helpers enumerate directly.

#ifndef NOISYHT_TESTS_ORACLES_HPP
#define NOISYHT_TESTS_ORACLES_HPP

#include "noisyht/blowup.hpp"
#include "noisyht/probcore.hpp"
#include "noisyht/rng.hpp"

#include <cmath>
#include <vector>

namespace noisyht::testing {

inline constexpr double kLn2 = 0.6931471805599453;

inline double h2(double p) {
  double t = 0.0;
  if (p > 0.0) t -= p * std::log(p);
  if (p < 1.0) t -= (1.0 - p) * std::log(1.0 - p);
  return t;
}

/// Inverse of binary entropy on [0, 1/2], by bisection.
inline double h2_inverse(double nats) {
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h2(mid) < nats ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double binary_convolve(double a, double b) {
  return a * (1.0 - b) + (1.0 - a) * b;
}

/// Mrs. Gerber closed form for the DSBS tradeoff: the best I(V;W) given
/// I(U;W) <= C is attained by a symmetric test channel.
inline double dsbs_theta(double flip_prob, double capacity_nats) {
  if (capacity_nats >= kLn2) return kLn2 - h2(flip_prob);
  if (capacity_nats <= 0.0) return 0.0;
  const double alpha = h2_inverse(kLn2 - capacity_nats);
  return kLn2 - h2(binary_convolve(flip_prob, alpha));
}

inline Pmf random_pmf(CounterRng& rng, const Alphabet& a) {
  return Pmf(a, rng.simplex_point(a.size));
}

inline JointPmf random_joint(CounterRng& rng, const Alphabet& rows,
                             const Alphabet& cols) {
  Vector flat = rng.simplex_point(rows.size * cols.size);
  Matrix m(rows.size, cols.size);
  for (int r = 0; r < rows.size; ++r) {
    for (int c = 0; c < cols.size; ++c) m(r, c) = flat(r * cols.size + c);
  }
  return JointPmf(rows, cols, std::move(m));
}

inline CondPmf random_cond(CounterRng& rng, const Alphabet& in,
                           const Alphabet& out) {
  Matrix m(in.size, out.size);
  for (int r = 0; r < in.size; ++r) {
    m.row(r) = rng.simplex_point(out.size).transpose();
  }
  return CondPmf(in, out, std::move(m));
}

inline Joint3Pmf random_joint3(CounterRng& rng, const Alphabet& a,
                               const Alphabet& b, const Alphabet& c) {
  Vector flat = rng.simplex_point(a.size * b.size * c.size);
  return Joint3Pmf(a, b, c,
                   std::vector<double>(flat.data(), flat.data() + flat.size()));
}

inline int hamming_distance(std::uint64_t a, std::uint64_t b, int n, int q) {
  int d = 0;
  for (int i = 0; i < n; ++i) {
    if (a % q != b % q) ++d;
    a /= q;
    b /= q;
  }
  return d;
}

/// Direct-definition Hamming neighborhood by pairwise distances.
inline SequenceSet brute_force_neighborhood(const SequenceSet& s, int l) {
  SequenceSet out(s.space());
  const int n = s.space().n;
  const int q = s.space().alphabet.size;
  for (std::uint64_t z = 0; z < s.space().total; ++z) {
    bool within = false;
    s.for_each([&](std::uint64_t member) {
      if (!within && hamming_distance(z, member, n, q) <= l) within = true;
    });
    if (within) out.insert(z);
  }
  return out;
}

}  // namespace noisyht::testing

#endif  // NOISYHT_TESTS_ORACLES_HPP
