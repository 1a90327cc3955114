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
// End-to-end acceptance suite. Each check prints one PASS/FAIL line; the
// process exits with the number of failed checks.

#include "noisyht/blowup.hpp"
#include "noisyht/capacity.hpp"
#include "noisyht/cli.hpp"
#include "noisyht/exponent.hpp"
#include "noisyht/io.hpp"
#include "noisyht/rng.hpp"
#include "noisyht/simulator.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace noisyht;
using namespace noisyht::testing;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void criterion(int number, const std::string& name,
               const std::function<std::pair<bool, std::string>()>& body) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    std::tie(ok, detail) = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  if (!ok) ++failures;
  std::printf("[%s] %2d %-28s %s (%.1fs)\n", ok ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str(), seconds_since(start));
  std::fflush(stdout);
}

std::string fmt(double v) { return format_number(v); }

// ---- helpers ----

Encoder identity_encoder(int n) {
  return Encoder::symbolwise(CondPmf::identity(Alphabet(2)), n);
}

TestInstance tuned_instance(const JointPmf& source, const Dmc& dmc, int n,
                            double target_alpha) {
  TestInstance inst(source, dmc, n, identity_encoder(n), DecisionRule{});
  inst.rule = tune_threshold(inst, target_alpha);
  return inst;
}

// Incremental product probability along a radius sweep: adds only the
// sequences that joined the set at this step.
double added_probability(const Pmf& letter,
                         const std::vector<std::uint64_t>& prev,
                         const SequenceSet& cur) {
  const SequenceSpace& sp = cur.space();
  const std::uint64_t q = sp.alphabet.size;
  double total = 0.0;
  const auto& words = cur.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t fresh = words[w] & ~prev[w];
    while (fresh) {
      const int b = __builtin_ctzll(fresh);
      fresh &= fresh - 1;
      std::uint64_t index = (static_cast<std::uint64_t>(w) << 6) | b;
      double p = 1.0;
      for (int i = 0; i < sp.n; ++i) {
        p *= letter(static_cast<int>(index % q));
        index /= q;
      }
      total += p;
    }
  }
  return total;
}

}  // namespace

int main() {
  std::printf("noisyht acceptance suite\n");

  // 1. Capacity solver matches the closed forms, fast.
  criterion(1, "capacity-oracle", [] {
    double worst = 0.0, slowest = 0.0;
    for (int i = 0; i <= 10; ++i) {
      const double p = 0.05 * i;
      auto t0 = std::chrono::steady_clock::now();
      const CapacityResult res = capacity(make_bsc(p), 1e-9);
      slowest = std::max(slowest, seconds_since(t0));
      worst = std::max(worst, std::abs(res.value - closed_form_capacity(
                                                       ChannelFamily::kBsc, p)));
    }
    for (int i = 0; i <= 10; ++i) {
      const double e = 0.1 * i;
      auto t0 = std::chrono::steady_clock::now();
      const CapacityResult res = capacity(make_bec(e), 1e-9);
      slowest = std::max(slowest, seconds_since(t0));
      worst = std::max(worst, std::abs(res.value - closed_form_capacity(
                                                       ChannelFamily::kBec, e)));
    }
    const bool ok = worst <= 1e-6 && slowest < 0.05;
    return std::make_pair(ok, "max_err=" + fmt(worst) +
                                  " slowest=" + fmt(slowest) + "s");
  });

  // 2. theta matches Mrs. Gerber; the grid scan follows at its coarser
  // tolerance.
  criterion(2, "exponent-oracle", [] {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> grid = log_spaced_grid(0.02, 50.0, 140);
    double worst_theta = 0.0, worst_direct = 0.0;
    for (double p : {0.05, 0.1, 0.2}) {
      const JointPmf source = make_dsbs(p);
      for (double frac : {0.25, 0.5, 0.75}) {
        const double cap = frac * kLn2;
        const double oracle = dsbs_theta(p, cap);
        const ExponentResult res = theta(source, cap, grid, 32, 2026);
        worst_theta = std::max(worst_theta, std::abs(res.theta - oracle));
        const double direct = theta_direct(source, cap, 0.02);
        worst_direct = std::max(worst_direct, std::abs(direct - oracle));
      }
    }
    const double elapsed = seconds_since(start);
    const bool ok = worst_theta <= 2e-3 && worst_direct <= 2e-2 &&
                    elapsed < 300.0;
    return std::make_pair(ok, "theta_err=" + fmt(worst_theta) +
                                  " direct_err=" + fmt(worst_direct) +
                                  " elapsed=" + fmt(elapsed) + "s");
  });

  // 3 + 4. Lagrangian consistency and the zero/cap laws over random
  // sources.
  criterion(3, "lagrangian-consistency", [] {
    CounterRng rng(303, 0);
    double worst_gap = -1.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int nu = 2 + static_cast<int>(rng.next_u64() % 2);
      const int nv = 2 + static_cast<int>(rng.next_u64() % 2);
      const JointPmf source = random_joint(rng, Alphabet(nu), Alphabet(nv));
      const double cap = rng.next_double() * std::log(3.0);
      const ExponentResult res =
          theta(source, cap, default_mu_grid(), 24, 1000 + trial);
      double raw_min = res.mu_trace.front().second;
      for (const auto& [mu, value] : res.mu_trace) {
        if (value < res.theta - 1e-6) {
          return std::make_pair(false, "hyperplane below theta at mu=" +
                                           fmt(mu));
        }
        raw_min = std::min(raw_min, value);
      }
      const double direct = theta_direct(source, cap, nu == 2 ? 0.02 : 0.125);
      worst_gap = std::max(worst_gap, direct - raw_min);
      if (raw_min < direct - 2e-2) {
        return std::make_pair(false, "grid min " + fmt(raw_min) +
                                         " below direct " + fmt(direct));
      }
    }
    return std::make_pair(true, "worst direct-minus-grid=" + fmt(worst_gap));
  });

  criterion(4, "zero-and-cap-laws", [] {
    CounterRng rng(404, 0);
    for (int trial = 0; trial < 50; ++trial) {
      const int nu = 2 + static_cast<int>(rng.next_u64() % 2);
      const int nv = 2 + static_cast<int>(rng.next_u64() % 2);
      const JointPmf source = random_joint(rng, Alphabet(nu), Alphabet(nv));
      const double cap = rng.next_double() * std::log(3.0);

      if (theta(source, 0.0, default_mu_grid(), 8, trial).theta > 1e-6) {
        return std::make_pair(false, std::string("zero law (C=0) violated"));
      }
      const auto [pu, pv] = marginals(source);
      if (theta(product(pu, pv), cap, default_mu_grid(), 8, trial).theta >
          1e-6) {
        return std::make_pair(false, std::string("zero law (product) violated"));
      }
      const double value =
          theta(source, cap, default_mu_grid(), 16, trial).theta;
      if (value > std::min(mutual_information(source), cap) + 1e-6) {
        return std::make_pair(false, "cap law violated: theta=" + fmt(value));
      }
    }
    return std::make_pair(true, std::string("50 sources checked"));
  });

  // 5. Blowing-up lemma holds exactly on enumerated spaces.
  criterion(5, "blowing-up-soundness", [] {
    const auto start = std::chrono::steady_clock::now();
    CounterRng rng(505, 0);
    long checks = 0;
    for (int q : {2, 3}) {
      for (int n : {6, 8, 10, 12}) {
        const SequenceSpace space(Alphabet(q), n);
        for (int trial = 0; trial < 100; ++trial) {
          Pmf letter = Pmf::uniform(space.alphabet);
          if (trial % 2 == 1) {
            Vector probs = rng.simplex_point(q).array() + 0.05;
            letter = Pmf(space.alphabet, Vector(probs / probs.sum()));
          }
          const double include = 0.05 + 0.9 * rng.next_double();
          SequenceSet set =
              SequenceSet::random(space, include, rng.next_u64());
          if (set.count() == 0) continue;
          const double prob0 = product_probability(letter, set);
          double prob = prob0;
          for (int l = 1; l <= n; ++l) {
            const SequenceSet next = hamming_neighborhood(set, 1);
            prob += added_probability(letter, set.words(), next);
            set = next;
            const BlowupBound bound = blowing_up_bound(prob0, n, l);
            if (!bound.vacuous) {
              ++checks;
              if (prob < bound.value - 1e-12) {
                return std::make_pair(
                    false, "violation at q=" + std::to_string(q) +
                               " n=" + std::to_string(n) +
                               " l=" + std::to_string(l));
              }
            }
          }
        }
      }
    }
    const double elapsed = seconds_since(start);
    return std::make_pair(elapsed < 120.0,
                          std::to_string(checks) + " bounds checked, " +
                              fmt(elapsed) + "s");
  });

  // 6. The blow-up type-II penalty factor bounds the exact ratio.
  criterion(6, "penalty-factor-bound", [] {
    CounterRng rng(606, 0);
    for (int trial = 0; trial < 20; ++trial) {
      // strictly positive channels (the penalty chain divides by it)
      Matrix chan(2, 2);
      const double a = 0.05 + 0.4 * rng.next_double();
      const double b = 0.05 + 0.4 * rng.next_double();
      chan << 1.0 - a, a, b, 1.0 - b;
      const Dmc dmc(CondPmf(Alphabet(2), Alphabet(2), chan));
      const JointPmf source = random_joint(rng, Alphabet(2), Alphabet(2));
      TestInstance inst(source, dmc, 8, identity_encoder(8), DecisionRule{});
      inst.rule = tune_threshold(inst, 0.05 + 0.45 * rng.next_double());

      const ErrorEstimate base = exact_errors(inst);
      const DecisionRule expl = materialize(inst);
      const int l = 1 + static_cast<int>(rng.next_u64() % 2);
      TestInstance blown(source, dmc, 8, identity_encoder(8),
                         blow_up_rule(expl, l));
      const ErrorEstimate est = exact_errors(blown);
      const double cap =
          base.beta * std::exp(penalty_factor_log(8, l, 2, dmc.p_floor));
      if (est.beta > cap + 1e-12) {
        return std::make_pair(false, "beta_blown=" + fmt(est.beta) +
                                         " cap=" + fmt(cap));
      }
    }
    return std::make_pair(true, std::string("20 instances, zero violations"));
  });

  // 7. Change-of-measure bounds on the bundled n=4 demo instance.
  criterion(7, "measure-change-bounds", [] {
    const double epsilon = 0.3, gamma = 0.35;
    TestInstance demo = tuned_instance(make_dsbs(0.1), make_bsc(0.1), 4,
                                       epsilon);
    const ErrorEstimate err = exact_errors(demo);
    if (err.alpha > epsilon + 1e-9) {
      return std::make_pair(false, std::string("alpha above epsilon"));
    }
    const ReliableSet reliable = reliable_set(demo, gamma);
    const double lb = (1.0 - epsilon) / (1.0 + epsilon);
    if (reliable.prob_h0 < lb - 1e-9) {
      return std::make_pair(false,
                            "P(B)=" + fmt(reliable.prob_h0) + " < " + fmt(lb));
    }
    const auto [trunc, report] = truncated_measure(demo, reliable, epsilon);
    const bool ok = report.v_dominated && report.y_dominated &&
                    report.kl_identity_gap <= 1e-9 && report.kl_bounded &&
                    report.markov_cmi <= 1e-9;
    return std::make_pair(
        ok, "P(B)=" + fmt(reliable.prob_h0) + " kl=" + fmt(report.kl) +
                " max_v_ratio=" + fmt(report.max_v_ratio) +
                " max_y_ratio=" + fmt(report.max_y_ratio));
  });

  // 8. No scheme in the regression family beats theta (strong converse).
  criterion(8, "strong-converse-ceiling", [] {
    const auto start = std::chrono::steady_clock::now();
    const JointPmf source = make_dsbs(0.1);
    const Dmc dmc = make_bsc(0.1);
    const double cap = capacity(dmc).value;
    const ExponentResult ex =
        theta(source, cap, log_spaced_grid(0.02, 50.0, 140), 32, 8);
    // cross-check theta itself against the closed form before using it
    if (std::abs(ex.theta - dsbs_theta(0.1, cap)) > 2e-3) {
      return std::make_pair(false, std::string("theta drifted from oracle"));
    }
    double worst_margin = 1e9;
    std::string detail;
    for (double target : {0.1, 0.3, 0.5}) {
      // The fit window sits at the top of the allowed blocklengths: the
      // finite-n bias of -ln(beta_n)/n decays like (ln n)/n, and the
      // short-n sawtooth from threshold atoms would otherwise dominate
      // the least-squares slope.
      std::vector<std::pair<int, double>> n_beta;
      for (int n : {8, 10}) {
        n_beta.emplace_back(n, exact_errors(tuned_instance(source, dmc, n,
                                                           target))
                                   .beta);
      }
      for (int n : {12, 14, 16}) {
        const TestInstance inst = tuned_instance(source, dmc, n, target);
        n_beta.emplace_back(
            n, monte_carlo_errors(inst, 1000000, 800 + n).beta);
      }
      const ExponentFit fit = fit_exponent(n_beta);
      const ConverseReport rep = converse_check(fit.slope, ex.theta, 0.05);
      worst_margin = std::min(worst_margin, rep.margin);
      detail += " slope(" + fmt(target) + ")=" + fmt(fit.slope);
      if (!rep.pass) {
        return std::make_pair(false, "converse violated:" + detail);
      }
    }
    const double elapsed = seconds_since(start);
    return std::make_pair(elapsed < 600.0,
                          "theta=" + fmt(ex.theta) + detail + " " +
                              fmt(elapsed) + "s");
  });

  // 9. Byte-identical CLI reruns.
  criterion(9, "cli-determinism", [] {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "noisyht_acceptance";
    fs::create_directories(dir);
    const std::string source_doc = (dir / "dsbs.json").string();
    {
      std::ofstream out(source_doc);
      out << "{\"joint\": [[0.45, 0.05], [0.05, 0.45]]}";
    }
    const std::string instance_doc = (dir / "inst.json").string();
    {
      std::ofstream out(instance_doc);
      out << "{\"joint\": [[0.45, 0.05], [0.05, 0.45]],"
             " \"channel\": [[0.9, 0.1], [0.1, 0.9]],"
             " \"encoder\": {\"kind\": \"identity\"}}";
    }
    auto slurp = [](const std::string& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      return s.str();
    };

    const std::string r1 = (dir / "r1.csv").string();
    const std::string r2 = (dir / "r2.csv").string();
    for (const std::string& out : {r1, r2}) {
      const int code = cli::run({"region", "--source", source_doc,
                                 "--capacity-grid", "0:0.6931:4", "--mu-grid",
                                 "0.1:10:10", "--restarts", "6", "--out", out});
      if (code != 0) return std::make_pair(false, std::string("region failed"));
    }
    if (slurp(r1) != slurp(r2)) {
      return std::make_pair(false, std::string("region CSV differs"));
    }

    const std::string s1 = (dir / "s1.csv").string();
    const std::string s2 = (dir / "s2.csv").string();
    for (const std::string& out : {s1, s2}) {
      const int code =
          cli::run({"simulate", "--config", instance_doc, "--n-list", "4,8",
                    "--trials", "50000", "--seed", "5", "--out", out});
      if (code != 0) {
        return std::make_pair(false, std::string("simulate failed"));
      }
    }
    if (slurp(s1) != slurp(s2)) {
      return std::make_pair(false, std::string("simulate CSV differs"));
    }
    return std::make_pair(true, std::string("region and simulate reruns identical"));
  });

  // 10. The single-letter bound dominates theta. The reference theta uses
  // a dense mu grid: a coarse grid overestimates the infimum and would
  // charge that overshoot against the bound.
  criterion(10, "single-letter-dominance", [] {
    CounterRng rng(1010, 0);
    const std::vector<double> grid = log_spaced_grid(1e-2, 1e2, 160);
    double worst = 1e9;
    for (int trial = 0; trial < 20; ++trial) {
      const int nu = 2 + static_cast<int>(rng.next_u64() % 2);
      const int nv = 2 + static_cast<int>(rng.next_u64() % 2);
      const JointPmf source = random_joint(rng, Alphabet(nu), Alphabet(nv));
      const double cap = rng.next_double() * kLn2;
      const double theta_value = theta(source, cap, grid, 16, trial).theta;
      for (double mu : {0.5, 1.0, 2.0}) {
        for (double nu_coef : {1.0, 10.0, 100.0}) {
          const double bound =
              r_s_mu_nu(source, cap, mu, nu_coef, 6, 2000 + trial);
          worst = std::min(worst, bound - theta_value);
          if (bound < theta_value - 1e-6) {
            return std::make_pair(
                false, "bound=" + fmt(bound) + " theta=" + fmt(theta_value) +
                           " mu=" + fmt(mu) + " nu=" + fmt(nu_coef));
          }
        }
      }
    }
    return std::make_pair(true, "min bound-minus-theta=" + fmt(worst));
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
