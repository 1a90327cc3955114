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

#include "noisyht/blowup.hpp"

#include "noisyht/rng.hpp"

#include <cmath>

namespace noisyht {

namespace {

constexpr std::uint64_t kMaxEnumerated = 1ull << 28;

std::size_t word_count(std::uint64_t total) {
  return static_cast<std::size_t>((total + 63) >> 6);
}

// out |= in << shift_bits, over bitsets of `total` valid bits.
void or_shifted_left(std::vector<std::uint64_t>& out,
                     const std::vector<std::uint64_t>& in,
                     std::uint64_t shift_bits, std::uint64_t total) {
  const std::uint64_t word_shift = shift_bits >> 6;
  const int bit_shift = static_cast<int>(shift_bits & 63);
  const std::size_t nwords = out.size();
  for (std::size_t w = nwords; w-- > 0;) {
    if (w < word_shift) break;
    const std::size_t src = w - word_shift;
    std::uint64_t v = in[src] << bit_shift;
    if (bit_shift != 0 && src > 0) {
      v |= in[src - 1] >> (64 - bit_shift);
    }
    out[w] |= v;
  }
  // Clear any bits past the end of the space in the final word.
  const int tail = static_cast<int>(total & 63);
  if (tail != 0) out[nwords - 1] &= (~0ull) >> (64 - tail);
}

// out |= (in & mask(position, digit)) >> (digit * stride).
// The digit-d mask is runs of `stride` ones every q*stride bits, offset by
// d*stride; the masked extraction walks those runs directly.
void or_masked_right(std::vector<std::uint64_t>& out,
                     const std::vector<std::uint64_t>& in, std::uint64_t stride,
                     int q, int digit, std::uint64_t total) {
  const std::uint64_t period = stride * static_cast<std::uint64_t>(q);
  const std::uint64_t shift = stride * static_cast<std::uint64_t>(digit);
  for (std::uint64_t run = shift; run < total; run += period) {
    const std::uint64_t len = std::min<std::uint64_t>(stride, total - run);
    // Copy bits [run, run+len) of `in` into bits [run-shift, ...) of `out`.
    std::uint64_t src = run;
    std::uint64_t dst = run - shift;
    std::uint64_t remaining = len;
    while (remaining > 0) {
      const int src_off = static_cast<int>(src & 63);
      const int dst_off = static_cast<int>(dst & 63);
      const int chunk = static_cast<int>(
          std::min<std::uint64_t>(remaining, 64 - std::max(src_off, dst_off)));
      const std::uint64_t mask = chunk == 64 ? ~0ull : ((1ull << chunk) - 1);
      const std::uint64_t bits = (in[src >> 6] >> src_off) & mask;
      out[dst >> 6] |= bits << dst_off;
      src += chunk;
      dst += chunk;
      remaining -= chunk;
    }
  }
}

}  // namespace

SequenceSpace::SequenceSpace(Alphabet a, int length)
    : alphabet(std::move(a)), n(length), total(1) {
  if (length < 1) throw std::invalid_argument("SequenceSpace: n must be >= 1");
  for (int i = 0; i < length; ++i) {
    if (total > kMaxEnumerated / static_cast<std::uint64_t>(alphabet.size)) {
      throw SizeCapError("SequenceSpace: |Z|^n exceeds 2^28");
    }
    total *= static_cast<std::uint64_t>(alphabet.size);
  }
}

int SequenceSpace::symbol_at(std::uint64_t index, int position) const {
  return static_cast<int>((index / stride(position)) %
                          static_cast<std::uint64_t>(alphabet.size));
}

std::uint64_t SequenceSpace::stride(int position) const {
  std::uint64_t s = 1;
  for (int i = 0; i < position; ++i) s *= alphabet.size;
  return s;
}

void SequenceSpace::decode(std::uint64_t index, int* symbols) const {
  const std::uint64_t q = alphabet.size;
  for (int i = 0; i < n; ++i) {
    symbols[i] = static_cast<int>(index % q);
    index /= q;
  }
}

SequenceSet::SequenceSet(SequenceSpace space)
    : space_(std::move(space)), words_(word_count(space_.total), 0) {}

std::uint64_t SequenceSet::count() const {
  std::uint64_t c = 0;
  for (std::uint64_t w : words_) c += __builtin_popcountll(w);
  return c;
}

bool SequenceSet::subset_of(const SequenceSet& other) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

bool SequenceSet::operator==(const SequenceSet& other) const {
  return space_ == other.space_ && words_ == other.words_;
}

SequenceSet& SequenceSet::operator|=(const SequenceSet& other) {
  if (!(space_ == other.space_)) {
    throw std::invalid_argument("SequenceSet: space mismatch");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

SequenceSet SequenceSet::full(SequenceSpace space) {
  SequenceSet s(std::move(space));
  for (auto& w : s.words_) w = ~0ull;
  const int tail = static_cast<int>(s.space_.total & 63);
  if (tail != 0) s.words_.back() &= (~0ull) >> (64 - tail);
  return s;
}

SequenceSet SequenceSet::random(SequenceSpace space, double include_prob,
                                std::uint64_t seed) {
  SequenceSet s(std::move(space));
  CounterRng rng(seed, /*stream=*/0x5e7);
  for (std::uint64_t i = 0; i < s.space_.total; ++i) {
    rng.seek(i);
    if (rng.next_double() < include_prob) s.insert(i);
  }
  return s;
}

SequenceSet hamming_neighborhood(const SequenceSet& s, int l) {
  if (l < 0) throw std::invalid_argument("hamming_neighborhood: l < 0");
  const SequenceSpace& sp = s.space();
  const int q = sp.alphabet.size;
  SequenceSet current = s;
  std::vector<std::uint64_t> collapsed(current.words_.size());
  for (int round = 0; round < l; ++round) {
    SequenceSet next = current;
    std::uint64_t stride = 1;
    for (int pos = 0; pos < sp.n; ++pos) {
      // Project every digit value at `pos` down to digit 0, then replicate
      // the projection across all digit values.
      std::fill(collapsed.begin(), collapsed.end(), 0ull);
      for (int d = 0; d < q; ++d) {
        or_masked_right(collapsed, current.words_, stride, q, d, sp.total);
      }
      for (int a = 0; a < q; ++a) {
        or_shifted_left(next.words_, collapsed,
                        stride * static_cast<std::uint64_t>(a), sp.total);
      }
      stride *= static_cast<std::uint64_t>(q);
    }
    if (next == current) break;  // saturated early
    current = std::move(next);
  }
  return current;
}

BlowupBound blowing_up_bound(double prob_d, int n, int l) {
  if (prob_d <= 0.0) {
    throw std::invalid_argument("blowing_up_bound: P(D) must be positive");
  }
  if (prob_d > 1.0) {
    throw std::invalid_argument("blowing_up_bound: P(D) above 1");
  }
  const double threshold = std::sqrt(0.5 * n * std::log(1.0 / prob_d));
  if (static_cast<double>(l) <= threshold) {
    return {0.0, true};
  }
  const double excess = static_cast<double>(l) - threshold;
  double value = 1.0 - std::exp(-2.0 / n * excess * excess);
  value = std::min(1.0, std::max(0.0, value));
  return {value, false};
}

BlowupParams compute_l_n(int n, double epsilon, double b_of_n) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("compute_l_n: epsilon outside (0,1)");
  }
  if (b_of_n < 0.0) throw std::invalid_argument("compute_l_n: b(n) negative");
  BlowupParams p;
  p.n = n;
  p.epsilon = epsilon;
  p.b_of_n = b_of_n;
  const double raw =
      (std::sqrt(n * b_of_n) +
       std::sqrt(n * std::log((1.0 + epsilon) / (1.0 - epsilon)))) /
      std::sqrt(2.0);
  p.l_n = static_cast<int>(std::ceil(raw));
  p.eps_prime = 1.0 - std::exp(-b_of_n);
  return p;
}

double penalty_factor_log(int n, int l_n, int y_size, double p_floor) {
  if (l_n == 0) return 0.0;
  if (l_n < 0) throw std::invalid_argument("penalty_factor_log: l_n < 0");
  if (!(p_floor > 0.0 && p_floor <= 1.0)) {
    throw std::invalid_argument("penalty_factor_log: p_floor outside (0,1]");
  }
  return l_n * (std::log(static_cast<double>(y_size) * n) + 1.0 -
                std::log(p_floor * l_n));
}

double product_probability(const Pmf& letter, const SequenceSet& s) {
  const SequenceSpace& sp = s.space();
  if (!(letter.alphabet() == sp.alphabet)) {
    throw std::invalid_argument("product_probability: alphabet mismatch");
  }
  const std::uint64_t q = sp.alphabet.size;
  double total = 0.0;
  s.for_each([&](std::uint64_t index) {
    double p = 1.0;
    for (int i = 0; i < sp.n; ++i) {
      p *= letter(static_cast<int>(index % q));
      index /= q;
    }
    total += p;
  });
  return total;
}

BlowupCheck verify_blowup_exact(const Pmf& letter, const SequenceSet& s,
                                int l) {
  const double prob_s = product_probability(letter, s);
  BlowupCheck check;
  if (prob_s <= 0.0) {
    throw std::invalid_argument("verify_blowup_exact: P(s) must be positive");
  }
  const BlowupBound bound = blowing_up_bound(prob_s, s.space().n, l);
  check.exact = product_probability(letter, hamming_neighborhood(s, l));
  check.bound = bound.value;
  check.vacuous = bound.vacuous;
  return check;
}

}  // namespace noisyht
