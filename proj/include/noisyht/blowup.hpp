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

#ifndef NOISYHT_BLOWUP_HPP
#define NOISYHT_BLOWUP_HPP

#include "noisyht/probcore.hpp"

#include <cstdint>
#include <vector>

namespace noisyht {

/// Length-n product space over a finite alphabet, indexed by the base-|Z|
/// positional code: the symbol at position i is digit i (position 0 least
/// significant). Enumerated use is refused above 2^28 sequences.
struct SequenceSpace {
  Alphabet alphabet;
  int n;
  std::uint64_t total;

  SequenceSpace(Alphabet a, int length);

  int symbol_at(std::uint64_t index, int position) const;
  std::uint64_t stride(int position) const;  // |Z|^position
  void decode(std::uint64_t index, int* symbols) const;

  bool operator==(const SequenceSpace& other) const {
    return alphabet == other.alphabet && n == other.n;
  }
};

/// Subset of a SequenceSpace as a dense bitset.
class SequenceSet {
 public:
  explicit SequenceSet(SequenceSpace space);

  const SequenceSpace& space() const { return space_; }
  bool contains(std::uint64_t index) const {
    return (words_[index >> 6] >> (index & 63)) & 1u;
  }
  void insert(std::uint64_t index) { words_[index >> 6] |= 1ull << (index & 63); }
  std::uint64_t count() const;
  bool subset_of(const SequenceSet& other) const;
  bool operator==(const SequenceSet& other) const;
  SequenceSet& operator|=(const SequenceSet& other);

  /// Visit member indices in increasing order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        fn((static_cast<std::uint64_t>(w) << 6) | b);
        bits &= bits - 1;
      }
    }
  }

  static SequenceSet empty(SequenceSpace space) { return SequenceSet(space); }
  static SequenceSet full(SequenceSpace space);
  /// Independent inclusion with probability p per sequence; draw for index
  /// i depends only on (seed, i).
  static SequenceSet random(SequenceSpace space, double include_prob,
                            std::uint64_t seed);

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  SequenceSpace space_;
  std::vector<std::uint64_t> words_;

  friend SequenceSet hamming_neighborhood(const SequenceSet&, int);
};

/// Hamming l-neighborhood: all sequences within distance l of the set,
/// computed as l rounds of distance-1 expansion.
SequenceSet hamming_neighborhood(const SequenceSet& s, int l);

struct BlowupBound {
  double value = 0.0;
  bool vacuous = false;  // l at or below the lemma threshold
};

/// Product-measure lower bound on P(Gamma^l(D)) given P(D), valid for
/// l > sqrt((n/2) ln(1/P(D))); below the threshold the bound is reported
/// as 0 and flagged vacuous.
BlowupBound blowing_up_bound(double prob_d, int n, int l);

struct BlowupParams {
  int n = 0;
  double epsilon = 0.0;
  double b_of_n = 0.0;
  int l_n = 0;
  double eps_prime = 0.0;  // 1 - exp(-b(n))
};

/// l_n = ceil( (1/sqrt 2) ( sqrt(n b(n)) + sqrt(n ln((1+eps)/(1-eps))) ) ).
BlowupParams compute_l_n(int n, double epsilon, double b_of_n);

/// Natural log of the multiplicative type-II slack incurred by blowing up
/// decision regions by l_n: l_n (ln(|Y| n) + 1 - ln(p_floor l_n)).
double penalty_factor_log(int n, int l_n, int y_size, double p_floor);

/// Probability of the set under the i.i.d. product of `letter`.
double product_probability(const Pmf& letter, const SequenceSet& s);

struct BlowupCheck {
  double exact = 0.0;
  double bound = 0.0;
  bool vacuous = false;
};

/// Exact P(Gamma^l(s)) under the product measure next to the lemma bound
/// evaluated at P(s).
BlowupCheck verify_blowup_exact(const Pmf& letter, const SequenceSet& s, int l);

}  // namespace noisyht

#endif  // NOISYHT_BLOWUP_HPP
