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

#include "noisyht/simulator.hpp"

#include "noisyht/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <thread>
#include <unordered_map>

namespace noisyht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kExplicitPairCap = 1ull << 26;
// Per-letter scores clamp to +-2^46 lattice units so that length-64 sums
// stay far from int64 overflow.
constexpr std::int64_t kScoreClamp = 1ll << 46;

int env_thread_count() {
  const char* raw = std::getenv("NOISYHT_THREADS");
  if (raw == nullptr) return 1;
  const long v = std::strtol(raw, nullptr, 10);
  return v >= 1 && v <= 256 ? static_cast<int>(v) : 1;
}

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

std::int64_t quantize_score(double nats) {
  if (std::isinf(nats)) return nats > 0 ? kScoreClamp : -kScoreClamp;
  const double scaled = nats * std::exp2(kScoreFractionBits);
  if (scaled >= static_cast<double>(kScoreClamp)) return kScoreClamp;
  if (scaled <= -static_cast<double>(kScoreClamp)) return -kScoreClamp;
  return std::llround(scaled);
}

Encoder Encoder::symbolwise(CondPmf u_to_x, int n) {
  if (n < 1) throw std::invalid_argument("Encoder: n must be >= 1");
  Encoder e(Kind::kSymbolwise, n);
  e.letter_map_ = std::move(u_to_x);
  return e;
}

Encoder Encoder::codebook(const JointPmf& source, const AuxChannel& aux,
                          const Pmf& channel_input_dist, int num_codewords,
                          int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("Encoder: n must be >= 1");
  if (num_codewords < 1) {
    throw std::invalid_argument("Encoder: need at least one codeword");
  }
  if (!(aux.cond.input_alphabet() == source.row_alphabet())) {
    throw std::invalid_argument("Encoder: aux alphabet mismatch");
  }
  Encoder e(Kind::kCodebook, n);
  e.aux_ = aux;
  e.seed_ = seed;

  // Codewords i.i.d. from the W marginal of compose(source, aux); channel
  // inputs i.i.d. from the given (capacity-achieving) input distribution.
  const Pmf w_marginal = compose(source, aux.cond).marginal(2);
  CounterRng rng_w(seed, /*stream=*/0xC0DE);
  CounterRng rng_x(seed, /*stream=*/0xC0DE + 1);
  e.codewords_.resize(num_codewords);
  e.input_words_.resize(num_codewords);
  for (int m = 0; m < num_codewords; ++m) {
    e.codewords_[m].resize(n);
    e.input_words_[m].resize(n);
    for (int i = 0; i < n; ++i) {
      e.codewords_[m][i] = rng_w.sample(w_marginal.probs());
      e.input_words_[m][i] = rng_x.sample(channel_input_dist.probs());
    }
  }
  return e;
}

const CondPmf& Encoder::letter_map() const {
  if (!letter_map_) throw std::logic_error("Encoder: not symbolwise");
  return *letter_map_;
}

const AuxChannel& Encoder::aux() const {
  if (!aux_) throw std::logic_error("Encoder: not a codebook encoder");
  return *aux_;
}

bool Encoder::deterministic_symbolwise() const {
  return kind_ == Kind::kSymbolwise && letter_map_->deterministic();
}

int Encoder::quantize(const std::vector<int>& u_word) const {
  const Matrix& a = aux().cond.rows();
  int best = 0;
  double best_score = -kInf;
  for (int m = 0; m < num_codewords(); ++m) {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double p = a(u_word[i], codewords_[m][i]);
      s += p > 0.0 ? std::log(p) : -1e18;
    }
    if (s > best_score) {
      best_score = s;
      best = m;
    }
  }
  return best;
}

TestInstance::TestInstance(JointPmf src, Dmc channel, int blocklength,
                           Encoder enc, DecisionRule decision)
    : source(std::move(src)), dmc(std::move(channel)), n(blocklength),
      encoder(std::move(enc)), rule(std::move(decision)) {
  if (n < 1) throw std::invalid_argument("TestInstance: n must be >= 1");
  if (encoder.n() != n) {
    throw std::invalid_argument("TestInstance: encoder blocklength mismatch");
  }
  if (encoder.kind() == Encoder::Kind::kSymbolwise) {
    if (!(encoder.letter_map().input_alphabet() == source.row_alphabet())) {
      throw std::invalid_argument("TestInstance: encoder input alphabet");
    }
    if (!(encoder.letter_map().output_alphabet() ==
          dmc.transition.input_alphabet())) {
      throw std::invalid_argument("TestInstance: encoder/channel alphabets");
    }
  }
}

JointPmf TestInstance::letter_joint_yv() const {
  if (encoder.kind() != Encoder::Kind::kSymbolwise) {
    throw std::invalid_argument("letter_joint_yv: symbolwise encoders only");
  }
  // p(y,v) = sum_{u,x} P_UV(u,v) enc(x|u) W(y|x)
  const Matrix xv = encoder.letter_map().rows().transpose() * source.probs();
  Matrix yv = dmc.transition.rows().transpose() * xv;
  return JointPmf(dmc.transition.output_alphabet(), source.col_alphabet(),
                  std::move(yv));
}

namespace {

// Exact joint law of the additive integer score under H0 and H1, by
// convolving the per-letter law n times. The per-letter score support is
// tiny, so the map stays small (multiset-of-values bound).
std::map<std::int64_t, std::pair<double, double>> score_distribution(
    const JointPmf& h0_letter, int n,
    const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& score) {
  const auto [p_y, p_v] = marginals(h0_letter);
  std::map<std::int64_t, std::pair<double, double>> dist;
  dist[0] = {1.0, 1.0};
  for (int letter = 0; letter < n; ++letter) {
    std::map<std::int64_t, std::pair<double, double>> next;
    for (const auto& [s, p] : dist) {
      for (int y = 0; y < h0_letter.rows(); ++y) {
        for (int v = 0; v < h0_letter.cols(); ++v) {
          const double p0 = h0_letter(y, v);
          const double p1 = p_y(y) * p_v(v);
          if (p0 <= 0.0 && p1 <= 0.0) continue;
          auto& cell = next[s + score(y, v)];
          cell.first += p.first * p0;
          cell.second += p.second * p1;
        }
      }
    }
    dist = std::move(next);
  }
  return dist;
}

struct ExplicitTotals {
  double h0_accept = 0.0;
  double h1_accept = 0.0;
};

ExplicitTotals enumerate_explicit(const TestInstance& inst) {
  const std::vector<SequenceSet>& regions = *inst.rule.regions;
  const JointPmf letter = inst.letter_joint_yv();
  const auto [p_y, p_v] = marginals(letter);
  const int ny = letter.rows();
  const int nv = letter.cols();
  const std::uint64_t v_total = ipow(nv, inst.n);
  const std::uint64_t y_total = ipow(ny, inst.n);
  if (v_total > kExplicitPairCap / y_total) {
    throw SizeCapError("exact_errors: |Y|^n |V|^n above 2^26");
  }
  if (regions.size() != v_total) {
    throw std::invalid_argument("exact_errors: region count != |V|^n");
  }

  ExplicitTotals totals;
  std::vector<int> v_digits(inst.n);
  for (std::uint64_t v_idx = 0; v_idx < v_total; ++v_idx) {
    std::uint64_t rest = v_idx;
    double pv_word = 1.0;
    for (int i = 0; i < inst.n; ++i) {
      v_digits[i] = static_cast<int>(rest % nv);
      pv_word *= p_v(v_digits[i]);
      rest /= nv;
    }
    double h0_region = 0.0, py_region = 0.0;
    regions[v_idx].for_each([&](std::uint64_t y_idx) {
      double p0 = 1.0, py = 1.0;
      for (int i = 0; i < inst.n; ++i) {
        const int y = static_cast<int>(y_idx % ny);
        p0 *= letter(y, v_digits[i]);
        py *= p_y(y);
        y_idx /= ny;
      }
      h0_region += p0;
      py_region += py;
    });
    totals.h0_accept += h0_region;
    totals.h1_accept += pv_word * py_region;
  }
  return totals;
}

double hoeffding_halfwidth(std::uint64_t trials) {
  return std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(trials)));
}

double beta_exponent_of(double beta, int n) {
  if (beta <= 0.0) return kInf;
  return -std::log(beta) / n;
}

// Sampling laws precomputed once per run.
struct TrialLaws {
  Vector p_u, p_v;

  explicit TrialLaws(const TestInstance& inst)
      : p_u(inst.source.probs().rowwise().sum()),
        p_v(inst.source.probs().colwise().sum().transpose()) {}
};

// One simulated decision. Counter layout per trial: source draws in
// [0, 2n), encoder draws in [2n, 3n), channel draws in [3n, 4n); a draw's
// value depends only on (seed, hypothesis stream, trial, slot).
bool trial_accepts(const TestInstance& inst, const TrialLaws& laws,
                   int hypothesis, std::uint64_t trial, std::uint64_t seed,
                   std::vector<int>& u, std::vector<int>& v,
                   std::vector<int>& x, std::vector<int>& y,
                   std::int64_t* score_out) {
  const int n = inst.n;
  CounterRng rng(seed, static_cast<std::uint64_t>(hypothesis));
  const std::uint64_t base = trial * static_cast<std::uint64_t>(4 * n);

  const Matrix& src = inst.source.probs();
  const int nv = inst.source.cols();
  if (hypothesis == 0) {
    const int total = inst.source.rows() * nv;
    for (int i = 0; i < n; ++i) {
      rng.seek(base + i);
      const double r = rng.next_double();
      double acc = 0.0;
      int flat = 0;
      for (; flat < total - 1; ++flat) {
        acc += src(flat / nv, flat % nv);
        if (r < acc) break;
      }
      u[i] = flat / nv;
      v[i] = flat % nv;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      rng.seek(base + i);
      u[i] = rng.sample(laws.p_u);
      rng.seek(base + n + i);
      v[i] = rng.sample(laws.p_v);
    }
  }

  if (inst.encoder.kind() == Encoder::Kind::kSymbolwise) {
    const Matrix& enc = inst.encoder.letter_map().rows();
    for (int i = 0; i < n; ++i) {
      rng.seek(base + 2 * n + i);
      x[i] = rng.sample(enc.row(u[i]));
    }
  } else {
    const int m = inst.encoder.quantize(u);
    x = inst.encoder.input_word(m);
  }

  const Matrix& w = inst.dmc.transition.rows();
  for (int i = 0; i < n; ++i) {
    rng.seek(base + 3 * n + i);
    y[i] = rng.sample(w.row(x[i]));
  }

  if (inst.rule.is_explicit()) {
    const int ny = inst.dmc.output_size();
    std::uint64_t y_idx = 0, v_idx = 0;
    for (int i = n - 1; i >= 0; --i) {
      y_idx = y_idx * ny + y[i];
      v_idx = v_idx * nv + v[i];
    }
    if (score_out != nullptr) *score_out = 0;
    return (*inst.rule.regions)[v_idx].contains(y_idx);
  }

  const ThresholdRule& thr = *inst.rule.threshold;
  std::int64_t s = 0;
  if (thr.on_decoded_codeword) {
    // ML-decode the transmitted codeword, then score (w_hat, v) letters.
    int best = 0;
    double best_ll = -kInf;
    for (int m = 0; m < inst.encoder.num_codewords(); ++m) {
      const std::vector<int>& xm = inst.encoder.input_word(m);
      double ll = 0.0;
      for (int i = 0; i < n; ++i) {
        const double p = w(xm[i], y[i]);
        ll += p > 0.0 ? std::log(p) : -1e18;
      }
      if (ll > best_ll) {
        best_ll = ll;
        best = m;
      }
    }
    const std::vector<int>& wm = inst.encoder.codeword(best);
    for (int i = 0; i < n; ++i) s += thr.score(wm[i], v[i]);
  } else {
    for (int i = 0; i < n; ++i) s += thr.score(y[i], v[i]);
  }
  if (score_out != nullptr) *score_out = s;
  return s >= thr.threshold;
}

}  // namespace

ErrorEstimate exact_errors(const TestInstance& inst) {
  if (inst.encoder.kind() == Encoder::Kind::kCodebook) {
    throw std::invalid_argument(
        "exact_errors: codebook encoder; use monte_carlo_errors");
  }
  ErrorEstimate est;
  est.method = ErrorEstimate::Method::kExact;
  if (inst.rule.is_explicit()) {
    const ExplicitTotals t = enumerate_explicit(inst);
    est.alpha = std::max(0.0, 1.0 - t.h0_accept);
    est.beta = std::min(1.0, t.h1_accept);
  } else {
    const ThresholdRule& thr = *inst.rule.threshold;
    if (thr.on_decoded_codeword) {
      throw std::invalid_argument("exact_errors: decoded-codeword rule");
    }
    const auto dist =
        score_distribution(inst.letter_joint_yv(), inst.n, thr.score);
    double alpha = 0.0, beta = 0.0;
    for (const auto& [s, p] : dist) {
      if (s < thr.threshold) {
        alpha += p.first;
      } else {
        beta += p.second;
      }
    }
    est.alpha = std::min(1.0, alpha);
    est.beta = std::min(1.0, beta);
  }
  est.beta_exponent = beta_exponent_of(est.beta, inst.n);
  return est;
}

ErrorEstimate monte_carlo_errors(const TestInstance& inst,
                                 std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_errors: trials < 1");

  const TrialLaws laws(inst);
  const int threads = env_thread_count();
  auto count_hits = [&](int hypothesis, bool count_accepts) {
    // Partition into chunks; each trial's draws depend only on its own
    // index, so the partition does not affect the result.
    const std::uint64_t chunk = 1 << 14;
    const std::uint64_t nchunks = (trials + chunk - 1) / chunk;
    std::vector<std::uint64_t> hits(nchunks, 0);
    auto run_range = [&](std::uint64_t c0, std::uint64_t c1) {
      std::vector<int> u(inst.n), v(inst.n), x(inst.n), y(inst.n);
      for (std::uint64_t c = c0; c < c1; ++c) {
        const std::uint64_t lo = c * chunk;
        const std::uint64_t hi = std::min(trials, lo + chunk);
        std::uint64_t h = 0;
        for (std::uint64_t t = lo; t < hi; ++t) {
          const bool accept = trial_accepts(inst, laws, hypothesis, t, seed, u,
                                            v, x, y, nullptr);
          if (accept == count_accepts) ++h;
        }
        hits[c] = h;
      }
    };
    if (threads <= 1 || nchunks <= 1) {
      run_range(0, nchunks);
    } else {
      std::vector<std::thread> pool;
      const std::uint64_t per = (nchunks + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const std::uint64_t c0 = std::min<std::uint64_t>(nchunks, t * per);
        const std::uint64_t c1 = std::min<std::uint64_t>(nchunks, c0 + per);
        if (c0 < c1) pool.emplace_back(run_range, c0, c1);
      }
      for (auto& th : pool) th.join();
    }
    std::uint64_t total = 0;
    for (std::uint64_t h : hits) total += h;
    return total;
  };

  ErrorEstimate est;
  est.method = ErrorEstimate::Method::kMonteCarlo;
  est.trials = trials;
  est.seed = seed;
  est.alpha = static_cast<double>(count_hits(0, false)) / trials;
  est.beta = static_cast<double>(count_hits(1, true)) / trials;
  est.ci_halfwidth = hoeffding_halfwidth(trials);
  est.beta_exponent = beta_exponent_of(est.beta, inst.n);
  return est;
}

namespace {

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> llr_table(
    const JointPmf& joint) {
  const auto [p_a, p_b] = marginals(joint);
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> table(
      joint.rows(), joint.cols());
  for (int a = 0; a < joint.rows(); ++a) {
    for (int b = 0; b < joint.cols(); ++b) {
      const double j = joint(a, b);
      const double ind = p_a(a) * p_b(b);
      double llr;
      if (j <= 0.0 && ind <= 0.0) {
        llr = 0.0;
      } else if (j <= 0.0) {
        llr = -kInf;
      } else if (ind <= 0.0) {
        llr = kInf;
      } else {
        llr = std::log(j / ind);
      }
      table(a, b) = quantize_score(llr);
    }
  }
  return table;
}

DecisionRule rule_with_integer_threshold(const TestInstance& inst,
                                         std::int64_t t) {
  ThresholdRule thr;
  if (inst.encoder.kind() == Encoder::Kind::kSymbolwise) {
    thr.score = llr_table(inst.letter_joint_yv());
    thr.on_decoded_codeword = false;
  } else {
    const Joint3Pmf uvw = compose(inst.source, inst.encoder.aux().cond);
    thr.score = llr_table(uvw.pair_marginal(2, 1));  // (W, V)
    thr.on_decoded_codeword = true;
  }
  thr.threshold = t;
  DecisionRule rule;
  rule.threshold = std::move(thr);
  return rule;
}

}  // namespace

DecisionRule make_llr_threshold_rule(const TestInstance& inst, double t_nats) {
  return rule_with_integer_threshold(inst, quantize_score(t_nats));
}

DecisionRule tune_threshold(const TestInstance& inst, double target_alpha) {
  if (!(target_alpha > 0.0 && target_alpha < 1.0)) {
    throw std::invalid_argument("tune_threshold: target outside (0,1)");
  }
  if (inst.encoder.kind() != Encoder::Kind::kSymbolwise) {
    throw std::invalid_argument(
        "tune_threshold: symbolwise only; use tune_threshold_mc");
  }
  DecisionRule probe = rule_with_integer_threshold(inst, 0);
  const auto dist =
      score_distribution(inst.letter_joint_yv(), inst.n, probe.threshold->score);
  // Largest t with P0(S >= t) >= 1 - target; ties at t are accepted.
  double cum = 0.0;
  std::int64_t t = dist.begin()->first;  // fallback: accept everything
  for (auto it = dist.rbegin(); it != dist.rend(); ++it) {
    cum += it->second.first;
    if (cum >= 1.0 - target_alpha - 1e-15) {
      t = it->first;
      break;
    }
  }
  probe.threshold->threshold = t;
  return probe;
}

DecisionRule tune_threshold_mc(const TestInstance& inst, double target_alpha,
                               std::uint64_t trials, std::uint64_t seed) {
  if (!(target_alpha > 0.0 && target_alpha < 1.0)) {
    throw std::invalid_argument("tune_threshold_mc: target outside (0,1)");
  }
  if (trials < 1) throw std::invalid_argument("tune_threshold_mc: trials < 1");
  TestInstance probe(inst.source, inst.dmc, inst.n, inst.encoder,
                     rule_with_integer_threshold(inst, 0));
  const TrialLaws laws(probe);
  std::vector<std::int64_t> scores(trials);
  std::vector<int> u(inst.n), v(inst.n), x(inst.n), y(inst.n);
  for (std::uint64_t t = 0; t < trials; ++t) {
    trial_accepts(probe, laws, 0, t, seed, u, v, x, y, &scores[t]);
  }
  std::sort(scores.begin(), scores.end());
  const std::size_t idx =
      static_cast<std::size_t>(target_alpha * static_cast<double>(trials));
  const std::int64_t t =
      scores[std::min(idx, static_cast<std::size_t>(trials - 1))];
  return rule_with_integer_threshold(inst, t);
}

DecisionRule materialize(const TestInstance& inst) {
  if (inst.rule.is_explicit()) return inst.rule;
  const ThresholdRule& thr = *inst.rule.threshold;
  const int ny = inst.dmc.output_size();
  const int nv = inst.source.cols();
  const std::uint64_t y_total = ipow(ny, inst.n);
  const std::uint64_t v_total = ipow(nv, inst.n);
  if (v_total > kExplicitPairCap / y_total) {
    throw SizeCapError("materialize: |Y|^n |V|^n above 2^26");
  }
  const SequenceSpace y_space(inst.dmc.transition.output_alphabet(), inst.n);

  std::vector<std::vector<int>> decoded;  // codebook path: w_hat per y^n
  if (thr.on_decoded_codeword) {
    decoded.resize(y_total);
    const Matrix& w = inst.dmc.transition.rows();
    std::vector<int> y(inst.n);
    for (std::uint64_t y_idx = 0; y_idx < y_total; ++y_idx) {
      std::uint64_t rest = y_idx;
      for (int i = 0; i < inst.n; ++i) {
        y[i] = static_cast<int>(rest % ny);
        rest /= ny;
      }
      int best = 0;
      double best_ll = -kInf;
      for (int m = 0; m < inst.encoder.num_codewords(); ++m) {
        const std::vector<int>& xm = inst.encoder.input_word(m);
        double ll = 0.0;
        for (int i = 0; i < inst.n; ++i) {
          const double p = w(xm[i], y[i]);
          ll += p > 0.0 ? std::log(p) : -1e18;
        }
        if (ll > best_ll) {
          best_ll = ll;
          best = m;
        }
      }
      decoded[y_idx] = inst.encoder.codeword(best);
    }
  }

  std::vector<SequenceSet> regions;
  regions.reserve(v_total);
  std::vector<int> v_digits(inst.n);
  for (std::uint64_t v_idx = 0; v_idx < v_total; ++v_idx) {
    std::uint64_t rest = v_idx;
    for (int i = 0; i < inst.n; ++i) {
      v_digits[i] = static_cast<int>(rest % nv);
      rest /= nv;
    }
    SequenceSet region(y_space);
    for (std::uint64_t y_idx = 0; y_idx < y_total; ++y_idx) {
      std::int64_t s = 0;
      std::uint64_t yr = y_idx;
      for (int i = 0; i < inst.n; ++i) {
        const int y = static_cast<int>(yr % ny);
        s += thr.on_decoded_codeword ? thr.score(decoded[y_idx][i], v_digits[i])
                                     : thr.score(y, v_digits[i]);
        yr /= ny;
      }
      if (s >= thr.threshold) region.insert(y_idx);
    }
    regions.push_back(std::move(region));
  }
  DecisionRule rule;
  rule.regions = std::move(regions);
  return rule;
}

DecisionRule blow_up_rule(const DecisionRule& rule, int l) {
  if (!rule.is_explicit()) {
    throw std::invalid_argument("blow_up_rule: materialize the rule first");
  }
  std::vector<SequenceSet> blown;
  blown.reserve(rule.regions->size());
  for (const SequenceSet& region : *rule.regions) {
    blown.push_back(hamming_neighborhood(region, l));
  }
  DecisionRule out;
  out.regions = std::move(blown);
  return out;
}

ReliableSet reliable_set(const TestInstance& inst, double gamma) {
  if (!inst.encoder.deterministic_symbolwise()) {
    throw std::invalid_argument(
        "reliable_set: deterministic symbolwise encoder required");
  }
  const int nu = inst.source.rows();
  const int nv = inst.source.cols();
  const int ny = inst.dmc.output_size();
  const std::uint64_t u_total = ipow(nu, inst.n);
  const std::uint64_t v_total = ipow(nv, inst.n);
  const std::uint64_t y_total = ipow(ny, inst.n);
  if (u_total > kExplicitPairCap / v_total ||
      v_total > kExplicitPairCap / y_total) {
    throw SizeCapError("reliable_set: instance not enumerable");
  }

  // Per-letter deterministic map u -> x.
  std::vector<int> f(nu);
  const Matrix& enc = inst.encoder.letter_map().rows();
  for (int u = 0; u < nu; ++u) {
    int x = 0;
    enc.row(u).maxCoeff(&x);
    f[u] = x;
  }

  DecisionRule materialized;
  const std::vector<SequenceSet>* regions;
  if (inst.rule.is_explicit()) {
    regions = &*inst.rule.regions;
  } else {
    materialized = materialize(inst);
    regions = &*materialized.regions;
  }

  ReliableSet out;
  out.gamma = gamma;
  {
    DecisionRule explicit_rule;
    explicit_rule.regions = *regions;
    TestInstance exact_inst(inst.source, inst.dmc, inst.n, inst.encoder,
                            std::move(explicit_rule));
    out.alpha = exact_errors(exact_inst).alpha;
  }

  const Matrix& w = inst.dmc.transition.rows();
  // P(A(v^n) | x^n) memoized on the (x, v) word pair.
  std::unordered_map<std::uint64_t, double> accept_prob;
  std::vector<int> u_digits(inst.n), v_digits(inst.n);
  for (std::uint64_t u_idx = 0; u_idx < u_total; ++u_idx) {
    std::uint64_t rest = u_idx;
    for (int i = 0; i < inst.n; ++i) {
      u_digits[i] = static_cast<int>(rest % nu);
      rest /= nu;
    }
    std::uint64_t x_idx = 0;
    for (int i = inst.n - 1; i >= 0; --i) {
      x_idx = x_idx * inst.dmc.input_size() + f[u_digits[i]];
    }
    for (std::uint64_t v_idx = 0; v_idx < v_total; ++v_idx) {
      const std::uint64_t key = x_idx * v_total + v_idx;
      auto it = accept_prob.find(key);
      double pa;
      if (it != accept_prob.end()) {
        pa = it->second;
      } else {
        pa = 0.0;
        (*regions)[v_idx].for_each([&](std::uint64_t y_idx) {
          double p = 1.0;
          for (int i = 0; i < inst.n; ++i) {
            p *= w(f[u_digits[i]], static_cast<int>(y_idx % ny));
            y_idx /= ny;
          }
          pa += p;
        });
        accept_prob.emplace(key, pa);
      }
      if (pa >= gamma) {
        std::uint64_t vr = v_idx;
        double p_uv = 1.0;
        for (int i = 0; i < inst.n; ++i) {
          v_digits[i] = static_cast<int>(vr % nv);
          vr /= nv;
          p_uv *= inst.source(u_digits[i], v_digits[i]);
        }
        if (p_uv > 0.0) {
          out.members.emplace_back(static_cast<std::uint32_t>(u_idx),
                                   static_cast<std::uint32_t>(v_idx));
          out.prob_h0 += p_uv;
        }
      }
    }
  }
  return out;
}

std::pair<JointPmf, TruncationReport> truncated_measure(
    const TestInstance& inst, const ReliableSet& reliable, double epsilon) {
  if (reliable.prob_h0 <= 0.0) {
    throw std::invalid_argument("truncated_measure: P(B) = 0");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("truncated_measure: epsilon outside (0,1)");
  }
  if (!inst.encoder.deterministic_symbolwise()) {
    throw std::invalid_argument(
        "truncated_measure: deterministic symbolwise encoder required");
  }
  const int nu = inst.source.rows();
  const int nv = inst.source.cols();
  const int ny = inst.dmc.output_size();
  const std::uint64_t u_total = ipow(nu, inst.n);
  const std::uint64_t v_total = ipow(nv, inst.n);
  const std::uint64_t y_total = ipow(ny, inst.n);
  if (u_total * v_total > (1ull << 24) / y_total) {
    throw SizeCapError("truncated_measure: joint space too large");
  }

  std::vector<int> f(nu);
  const Matrix& enc = inst.encoder.letter_map().rows();
  for (int u = 0; u < nu; ++u) {
    int x = 0;
    enc.row(u).maxCoeff(&x);
    f[u] = x;
  }

  // Truncated (U^n, V^n) law; the channel factor is unchanged.
  Matrix trunc = Matrix::Zero(u_total, v_total);
  double kl = 0.0;
  std::vector<int> u_digits(inst.n), v_digits(inst.n);
  for (const auto& [u_idx, v_idx] : reliable.members) {
    std::uint64_t ur = u_idx, vr = v_idx;
    double p_uv = 1.0;
    for (int i = 0; i < inst.n; ++i) {
      p_uv *= inst.source(static_cast<int>(ur % nu), static_cast<int>(vr % nv));
      ur /= nu;
      vr /= nv;
    }
    const double q = p_uv / reliable.prob_h0;
    trunc(u_idx, v_idx) = q;
    if (q > 0.0) kl += q * std::log(q / p_uv);
  }

  const auto [p_u, p_v] = marginals(inst.source);
  const Matrix& w = inst.dmc.transition.rows();
  // Per-letter output law under the deterministic encoder.
  Vector p_y_letter = Vector::Zero(ny);
  for (int u = 0; u < nu; ++u) {
    for (int y = 0; y < ny; ++y) p_y_letter(y) += p_u(u) * w(f[u], y);
  }

  TruncationReport report;
  report.prob_b = reliable.prob_h0;
  report.kl = kl;
  report.kl_identity_gap = std::abs(kl - std::log(1.0 / reliable.prob_h0));
  report.domination_limit = (1.0 + epsilon) / (1.0 - epsilon);
  report.kl_bounded = kl <= std::log(report.domination_limit) + 1e-9;

  // Marginal domination, pointwise over words.
  report.v_dominated = true;
  const Vector trunc_v = trunc.colwise().sum().transpose();
  for (std::uint64_t v_idx = 0; v_idx < v_total; ++v_idx) {
    std::uint64_t vr = v_idx;
    double pv_word = 1.0;
    for (int i = 0; i < inst.n; ++i) {
      pv_word *= p_v(static_cast<int>(vr % nv));
      vr /= nv;
    }
    const double tv = trunc_v(static_cast<Eigen::Index>(v_idx));
    if (pv_word > 0.0) {
      report.max_v_ratio = std::max(report.max_v_ratio, tv / pv_word);
    }
    if (tv > report.domination_limit * pv_word + 1e-9) {
      report.v_dominated = false;
    }
  }

  report.y_dominated = true;
  for (std::uint64_t y_idx = 0; y_idx < y_total; ++y_idx) {
    std::uint64_t yr = y_idx;
    double py_word = 1.0;
    for (int i = 0; i < inst.n; ++i) {
      py_word *= p_y_letter(static_cast<int>(yr % ny));
      yr /= ny;
    }
    double ty = 0.0;
    for (const auto& [u_idx, v_idx] : reliable.members) {
      std::uint64_t ur = u_idx, rest = y_idx;
      double p_chan = 1.0;
      for (int i = 0; i < inst.n; ++i) {
        p_chan *= w(f[static_cast<int>(ur % nu)], static_cast<int>(rest % ny));
        ur /= nu;
        rest /= ny;
      }
      ty += trunc(u_idx, v_idx) * p_chan;
    }
    if (py_word > 0.0) {
      report.max_y_ratio = std::max(report.max_y_ratio, ty / py_word);
    }
    if (ty > report.domination_limit * py_word + 1e-9) {
      report.y_dominated = false;
    }
  }

  // Markov chain V~ - U~ - Y~: conditional mutual information vanishes.
  {
    std::vector<double> flat(u_total * v_total * y_total, 0.0);
    for (const auto& [u_idx, v_idx] : reliable.members) {
      for (std::uint64_t y_idx = 0; y_idx < y_total; ++y_idx) {
        std::uint64_t ur = u_idx, yr = y_idx;
        double p_chan = 1.0;
        for (int i = 0; i < inst.n; ++i) {
          p_chan *= w(f[static_cast<int>(ur % nu)], static_cast<int>(yr % ny));
          ur /= nu;
          yr /= ny;
        }
        flat[(static_cast<std::size_t>(u_idx) * v_total + v_idx) * y_total +
             y_idx] = trunc(u_idx, v_idx) * p_chan;
      }
    }
    Joint3Pmf uvy(Alphabet(static_cast<int>(u_total)),
                  Alphabet(static_cast<int>(v_total)),
                  Alphabet(static_cast<int>(y_total)), std::move(flat));
    report.markov_cmi = conditional_mutual_information(uvy, 0);
  }

  JointPmf trunc_pmf(Alphabet(static_cast<int>(u_total)),
                     Alphabet(static_cast<int>(v_total)), std::move(trunc));
  return {std::move(trunc_pmf), report};
}

ExponentFit fit_exponent(const std::vector<std::pair<int, double>>& n_beta) {
  if (n_beta.size() < 2) {
    throw std::invalid_argument("fit_exponent: need at least two points");
  }
  ExponentFit fit;
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, beta] : n_beta) {
    if (beta <= 0.0) {
      throw std::invalid_argument("fit_exponent: beta must be positive");
    }
    const double y = -std::log(beta);
    fit.per_n.emplace_back(n, y / n);
    sx += n;
    sy += y;
  }
  const double mx = sx / n_beta.size();
  const double my = sy / n_beta.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, beta] : n_beta) {
    const double dx = n - mx;
    sxy += dx * (-std::log(beta) - my);
    sxx += dx * dx;
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_exponent: degenerate n");
  fit.slope = sxy / sxx;
  return fit;
}

ExponentFit exponent_estimate(const std::vector<TestInstance>& instances,
                              const EstimatorOptions& options) {
  if (instances.size() < 3) {
    throw std::invalid_argument("exponent_estimate: need >= 3 blocklengths");
  }
  const Matrix& ref = instances.front().source.probs();
  std::vector<std::pair<int, double>> n_beta;
  int prev_n = 0;
  for (const TestInstance& inst : instances) {
    if (inst.n <= prev_n) {
      throw std::invalid_argument("exponent_estimate: n must increase");
    }
    const Matrix& cur = inst.source.probs();
    if (cur.rows() != ref.rows() || cur.cols() != ref.cols() ||
        (cur - ref).cwiseAbs().maxCoeff() > 0.0) {
      throw std::invalid_argument("exponent_estimate: mixed scheme family");
    }
    prev_n = inst.n;
    const ErrorEstimate est =
        options.exact
            ? exact_errors(inst)
            : monte_carlo_errors(
                  inst, options.trials,
                  options.seed + static_cast<std::uint64_t>(inst.n));
    if (est.beta <= 0.0) {
      throw std::invalid_argument(
          "exponent_estimate: beta = 0, exponent undefined at n=" +
          std::to_string(inst.n));
    }
    n_beta.emplace_back(inst.n, est.beta);
  }
  return fit_exponent(n_beta);
}

ConverseReport converse_check(double estimate, double theta, double slack) {
  if (slack < 0.0) throw std::invalid_argument("converse_check: slack < 0");
  ConverseReport report;
  report.margin = theta + slack - estimate;
  report.pass = report.margin >= 0.0;
  return report;
}

JointPmf make_dsbs(double flip_prob) {
  if (flip_prob < 0.0 || flip_prob > 1.0) {
    throw std::invalid_argument("make_dsbs: p outside [0,1]");
  }
  Matrix m(2, 2);
  m << (1.0 - flip_prob) / 2.0, flip_prob / 2.0, flip_prob / 2.0,
      (1.0 - flip_prob) / 2.0;
  return JointPmf(Alphabet(2), Alphabet(2), std::move(m));
}

}  // namespace noisyht
