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

#ifndef NOISYHT_SIMULATOR_HPP
#define NOISYHT_SIMULATOR_HPP

#include "noisyht/blowup.hpp"
#include "noisyht/capacity.hpp"
#include "noisyht/exponent.hpp"
#include "noisyht/probcore.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace noisyht {

/// Threshold scores live on an integer lattice (units of 2^-40 nats) so
/// that tie handling is exact and identical across the exact, Monte-Carlo
/// and materialized evaluation paths.
inline constexpr int kScoreFractionBits = 40;

std::int64_t quantize_score(double nats);

/// Observer-side map from source sequences to channel inputs. Symbolwise
/// encoders apply one per-letter stochastic map to every coordinate;
/// codebook encoders quantize u^n to the nearest codeword under the aux
/// law and transmit a matching input-codebook word. Tables are a pure
/// function of the seed.
class Encoder {
 public:
  enum class Kind { kSymbolwise, kCodebook };

  static Encoder symbolwise(CondPmf u_to_x, int n);
  static Encoder codebook(const JointPmf& source, const AuxChannel& aux,
                          const Pmf& channel_input_dist, int num_codewords,
                          int n, std::uint64_t seed);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  const CondPmf& letter_map() const;
  bool deterministic_symbolwise() const;

  const AuxChannel& aux() const;
  int num_codewords() const { return static_cast<int>(codewords_.size()); }
  const std::vector<int>& codeword(int m) const { return codewords_[m]; }
  const std::vector<int>& input_word(int m) const { return input_words_[m]; }
  std::uint64_t seed() const { return seed_; }

  /// Nearest codeword index for u^n under the aux log-likelihood,
  /// lowest index on ties.
  int quantize(const std::vector<int>& u_word) const;

 private:
  Encoder(Kind kind, int n) : kind_(kind), n_(n) {}

  Kind kind_;
  int n_;
  std::optional<CondPmf> letter_map_;
  std::optional<AuxChannel> aux_;
  std::vector<std::vector<int>> codewords_;
  std::vector<std::vector<int>> input_words_;
  std::uint64_t seed_ = 0;
};

struct ThresholdRule {
  /// Per-letter scores; rows indexed by the observed symbol (Y, or the
  /// decoded codeword symbol W for codebook instances), columns by V.
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> score;
  std::int64_t threshold = 0;
  bool on_decoded_codeword = false;
};

/// Acceptance region for H0: either one explicit set over Y^n per v^n, or
/// an additive threshold test (ties at the threshold are accepted).
struct DecisionRule {
  std::optional<std::vector<SequenceSet>> regions;
  std::optional<ThresholdRule> threshold;

  bool is_explicit() const { return regions.has_value(); }
};

/// One finite-blocklength test. The alternate hypothesis is always the
/// product of the source marginals (testing against independence).
struct TestInstance {
  JointPmf source;
  Dmc dmc;
  int n;
  Encoder encoder;
  DecisionRule rule;

  TestInstance(JointPmf src, Dmc channel, int blocklength, Encoder enc,
               DecisionRule decision);

  /// Per-letter (Y, V) law under H0; symbolwise encoders only.
  JointPmf letter_joint_yv() const;
};

struct ErrorEstimate {
  enum class Method { kExact, kMonteCarlo };
  double alpha = 0.0;
  double beta = 0.0;
  Method method = Method::kExact;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double ci_halfwidth = 0.0;         // 99% Hoeffding; 0 for exact
  double beta_exponent = 0.0;        // -ln(beta)/n, +inf when beta == 0
};

/// Exact error probabilities. Threshold rules evaluate through an exact
/// per-letter score convolution; explicit rules enumerate, refusing when
/// |Y|^n |V|^n exceeds 2^26.
ErrorEstimate exact_errors(const TestInstance& inst);

ErrorEstimate monte_carlo_errors(const TestInstance& inst,
                                 std::uint64_t trials, std::uint64_t seed);

/// Threshold rule with the per-letter log-likelihood-ratio score
/// ln(P_YV / (P_Y P_V)) and threshold t (nats).
DecisionRule make_llr_threshold_rule(const TestInstance& inst, double t_nats);

/// Largest threshold meeting alpha <= target (exact; symbolwise encoders).
DecisionRule tune_threshold(const TestInstance& inst, double target_alpha);

/// Monte-Carlo calibrated threshold for codebook instances.
DecisionRule tune_threshold_mc(const TestInstance& inst, double target_alpha,
                               std::uint64_t trials, std::uint64_t seed);

/// Explicit per-v^n regions for a threshold rule (size-capped).
DecisionRule materialize(const TestInstance& inst);

/// Replace every per-v region by its Hamming l-neighborhood.
DecisionRule blow_up_rule(const DecisionRule& rule, int l);

struct ReliableSet {
  double gamma = 0.0;
  double prob_h0 = 0.0;  // P((U^n, V^n, X^n) in B | H0)
  double alpha = 0.0;    // exact type-I error of the instance
  std::vector<std::pair<std::uint32_t, std::uint32_t>> members;  // (u,v) idx
};

/// B_n(gamma): pairs whose (deterministic) channel input accepts with
/// probability at least gamma. Requires a deterministic symbolwise encoder
/// and an enumerable instance.
ReliableSet reliable_set(const TestInstance& inst, double gamma);

struct TruncationReport {
  double prob_b = 0.0;
  double kl = 0.0;            // KL(truncated || original), computed directly
  double kl_identity_gap = 0.0;  // |kl - ln(1/P(B))|
  double domination_limit = 0.0;  // (1+eps)/(1-eps)
  double max_v_ratio = 0.0;   // max_v P~(v) / P(v)
  double max_y_ratio = 0.0;
  double markov_cmi = 0.0;    // I(V~; Y~ | U~), zero for the chain
  bool v_dominated = false;
  bool y_dominated = false;
  bool kl_bounded = false;

  bool pass() const {
    return v_dominated && y_dominated && kl_bounded &&
           kl_identity_gap <= 1e-9 && markov_cmi <= 1e-9;
  }
};

/// Conditioning of the H0 law on the reliable set, with the marginal
/// domination and divergence-cost checks evaluated exactly.
std::pair<JointPmf, TruncationReport> truncated_measure(
    const TestInstance& inst, const ReliableSet& reliable, double epsilon);

struct ExponentFit {
  double slope = 0.0;
  std::vector<std::pair<int, double>> per_n;  // (n, -ln(beta)/n)
};

/// Least-squares slope of -ln(beta_n) against n.
ExponentFit fit_exponent(const std::vector<std::pair<int, double>>& n_beta);

struct EstimatorOptions {
  bool exact = true;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Per-blocklength exponents and fitted slope over a scheme family.
ExponentFit exponent_estimate(const std::vector<TestInstance>& instances,
                              const EstimatorOptions& options);

struct ConverseReport {
  bool pass = false;
  double margin = 0.0;  // theta + slack - estimate
};

ConverseReport converse_check(double estimate, double theta, double slack);

/// Doubly symmetric binary source: uniform U, V = U flipped w.p. p.
JointPmf make_dsbs(double flip_prob);

}  // namespace noisyht

#endif  // NOISYHT_SIMULATOR_HPP
