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

#include "noisyht/cli.hpp"

#include "noisyht/blowup.hpp"
#include "noisyht/capacity.hpp"
#include "noisyht/exponent.hpp"
#include "noisyht/io.hpp"
#include "noisyht/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace noisyht::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kLn2 = 0.6931471805599453;

// CSV goes to --out when given (stdout otherwise); human-readable summary
// lines go to the other stream so piped CSV stays clean.
struct Output {
  std::string out_path;
  std::string csv;

  void csv_row(const std::string& line) {
    csv += line;
    csv += '\n';
  }
  void summary(const std::string& line) const {
    std::fputs((line + "\n").c_str(), out_path.empty() ? stderr : stdout);
  }
  void finish() const {
    if (out_path.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      atomic_write_text(out_path, csv);
    }
  }
};

void emit_config(const ordered_json& cfg, const std::string& out_path) {
  const std::string text = cfg.dump();
  if (!out_path.empty()) {
    atomic_write_text(out_path + ".config.json", text + "\n");
  }
  std::fputs(("config " + text + "\n").c_str(), stderr);
}

std::vector<double> parse_double_list(const std::string& text,
                                      const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": bad number '" +
                                  item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_double_list(text, what)) {
    out.push_back(static_cast<int>(std::lround(v)));
  }
  return out;
}

// "lo:hi:count" expands to a grid; otherwise a comma list.
std::vector<double> parse_grid(const std::string& text, bool log_spaced,
                               const char* what) {
  if (text.find(':') == std::string::npos) {
    return parse_double_list(text, what);
  }
  std::stringstream ss(text);
  std::string lo_s, hi_s, count_s;
  if (!std::getline(ss, lo_s, ':') || !std::getline(ss, hi_s, ':') ||
      !std::getline(ss, count_s, ':')) {
    throw std::invalid_argument(std::string(what) + ": expected lo:hi:count");
  }
  const double lo = std::stod(lo_s), hi = std::stod(hi_s);
  const int count = std::stoi(count_s);
  if (count < 1 || hi < lo) {
    throw std::invalid_argument(std::string(what) + ": bad grid spec");
  }
  if (log_spaced) return log_spaced_grid(lo, hi, count);
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  }
  return grid;
}

double display(double nats, bool bits) { return bits ? nats / kLn2 : nats; }

Dmc channel_from_document(const std::string& path) {
  const Document doc = load_document(path);
  if (!doc.channel) {
    throw std::invalid_argument(path + ": no \"channel\" key");
  }
  return Dmc(*doc.channel);
}

JointPmf joint_from_document(const std::string& path) {
  const Document doc = load_document(path);
  if (!doc.joint) {
    throw std::invalid_argument(path + ": no \"joint\" key");
  }
  return *doc.joint;
}

// ---- capacity ----

struct CapacityArgs {
  std::string channel_path;
  double tol = 1e-9;
  bool bits = false;
};

int run_capacity(const CapacityArgs& a) {
  ordered_json cfg{{"subcommand", "capacity"},
                   {"channel", a.channel_path},
                   {"tol", a.tol},
                   {"bits", a.bits}};
  emit_config(cfg, "");
  const Dmc dmc = channel_from_document(a.channel_path);
  const CapacityResult res = capacity(dmc, a.tol);
  const char* unit = a.bits ? "bits" : "nats";
  std::printf("capacity_%s %s\n", unit,
              format_number(display(res.value, a.bits)).c_str());
  std::string dist;
  for (int x = 0; x < res.input_dist.size(); ++x) {
    if (x > 0) dist += ' ';
    dist += format_number(res.input_dist(x));
  }
  std::printf("input_dist %s\n", dist.c_str());
  std::printf("iterations %d\n", res.iterations);
  std::printf("gap_nats %s\n", format_number(res.gap).c_str());
  std::printf("p_floor %s\n", format_number(dmc.p_floor).c_str());
  return 0;
}

// ---- exponent ----

struct ExponentArgs {
  std::string source_path;
  std::string channel_path;
  double capacity_nats = -1.0;
  std::string mu_grid = "1e-2:1e2:40";
  int restarts = 64;
  std::uint64_t seed = 0;
  bool oracle = false;
  double grid_step = 0.02;
  bool bits = false;
  std::string out;
};

int run_exponent(const ExponentArgs& a) {
  if ((a.capacity_nats < 0.0) == a.channel_path.empty()) {
    throw std::invalid_argument(
        "exponent: give exactly one of --capacity or --channel");
  }
  ordered_json cfg{{"subcommand", "exponent"},
                   {"source", a.source_path},
                   {"channel", a.channel_path},
                   {"capacity", a.capacity_nats},
                   {"mu_grid", a.mu_grid},
                   {"restarts", a.restarts},
                   {"seed", a.seed},
                   {"oracle", a.oracle},
                   {"grid_step", a.grid_step},
                   {"bits", a.bits},
                   {"out", a.out}};
  emit_config(cfg, a.out);

  const JointPmf source = joint_from_document(a.source_path);
  const double cap = a.channel_path.empty()
                         ? a.capacity_nats
                         : capacity(channel_from_document(a.channel_path)).value;
  const std::vector<double> grid = parse_grid(a.mu_grid, true, "--mu-grid");
  const ExponentResult res = theta(source, cap, grid, a.restarts, a.seed);

  Output output;
  output.out_path = a.out;
  const char* unit = a.bits ? "bits" : "nats";
  output.summary("capacity_" + std::string(unit) + " " +
                 format_number(display(cap, a.bits)));
  output.summary("theta_" + std::string(unit) + " " +
                 format_number(display(res.theta, a.bits)));
  output.summary("best_mu " + format_number(res.best_mu));
  output.summary("i_uv_" + std::string(unit) + " " +
                 format_number(display(mutual_information(source), a.bits)));
  if (a.oracle) {
    const double direct = theta_direct(source, cap, a.grid_step);
    output.summary("theta_direct_" + std::string(unit) + " " +
                   format_number(display(direct, a.bits)));
  }
  output.csv_row("mu,theta_mu_nats");
  for (const auto& [mu, value] : res.mu_trace) {
    output.csv_row(format_number(mu) + "," + format_number(value));
  }
  output.finish();
  return 0;
}

// ---- region ----

struct RegionArgs {
  std::string source_path;
  std::string capacity_grid = "0:0.6931471805599453:11";
  std::string mu_grid = "1e-2:1e2:40";
  int restarts = 64;
  std::uint64_t seed = 0;
  std::string out;
};

int run_region(const RegionArgs& a) {
  ordered_json cfg{{"subcommand", "region"},
                   {"source", a.source_path},
                   {"capacity_grid", a.capacity_grid},
                   {"mu_grid", a.mu_grid},
                   {"restarts", a.restarts},
                   {"seed", a.seed},
                   {"out", a.out}};
  emit_config(cfg, a.out);

  const JointPmf source = joint_from_document(a.source_path);
  const std::vector<double> caps =
      parse_grid(a.capacity_grid, false, "--capacity-grid");
  const std::vector<double> mus = parse_grid(a.mu_grid, true, "--mu-grid");
  const TradeoffRegion reg = region(source, caps, mus, a.restarts, a.seed);

  Output output;
  output.out_path = a.out;
  output.csv_row("capacity_nats,theta_nats,best_mu");
  for (const auto& point : reg.points) {
    output.csv_row(format_number(point.capacity) + "," +
                   format_number(point.theta) + "," +
                   format_number(point.best_mu));
  }
  output.finish();
  return 0;
}

// ---- blowup ----

struct BlowupArgs {
  int n = 0;
  int alphabet_size = 2;
  std::string set_spec = "random:0.5,1";
  std::string l_spec = "sweep";
  double epsilon = 0.5;
  double b = -1.0;  // default ln n
  std::string pmf;  // comma list; default uniform
  double p_floor = 1.0;
  std::string out;
};

SequenceSet set_from_spec(const SequenceSpace& space, const std::string& spec) {
  if (spec.rfind("random:", 0) == 0) {
    const std::string rest = spec.substr(7);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("--set: expected random:p,seed");
    }
    const double p = std::stod(rest.substr(0, comma));
    const std::uint64_t seed = std::stoull(rest.substr(comma + 1));
    return SequenceSet::random(space, p, seed);
  }
  // Otherwise a JSON file holding an array of member indices.
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("--set: cannot open " + spec);
  nlohmann::json j;
  in >> j;
  if (!j.is_array()) throw std::invalid_argument("--set: expected an array");
  SequenceSet s(space);
  for (const auto& item : j) {
    const std::uint64_t idx = item.get<std::uint64_t>();
    if (idx >= space.total) throw std::invalid_argument("--set: index range");
    s.insert(idx);
  }
  return s;
}

int run_blowup(const BlowupArgs& a) {
  const double b = a.b < 0.0 ? std::log(static_cast<double>(a.n)) : a.b;
  ordered_json cfg{{"subcommand", "blowup"}, {"n", a.n},
                   {"alphabet_size", a.alphabet_size}, {"set", a.set_spec},
                   {"l", a.l_spec}, {"epsilon", a.epsilon},
                   {"b", b}, {"pmf", a.pmf},
                   {"p_floor", a.p_floor}, {"out", a.out}};
  emit_config(cfg, a.out);

  const SequenceSpace space(Alphabet(a.alphabet_size), a.n);
  const SequenceSet base = set_from_spec(space, a.set_spec);
  if (base.count() == 0) {
    throw std::invalid_argument("blowup: the base set is empty");
  }
  Pmf letter = Pmf::uniform(space.alphabet);
  if (!a.pmf.empty()) {
    const std::vector<double> probs = parse_double_list(a.pmf, "--pmf");
    if (static_cast<int>(probs.size()) != a.alphabet_size) {
      throw std::invalid_argument("--pmf: length != alphabet size");
    }
    letter = Pmf(space.alphabet, Eigen::Map<const Vector>(
                                     probs.data(), a.alphabet_size));
  }

  std::vector<int> ls;
  if (a.l_spec == "sweep") {
    for (int l = 0; l <= a.n; ++l) ls.push_back(l);
  } else {
    ls.push_back(std::stoi(a.l_spec));
  }

  Output output;
  output.out_path = a.out;
  output.csv_row("l,exact_prob,lemma_bound,vacuous_flag");
  const double prob_base = product_probability(letter, base);
  SequenceSet current = base;
  int reached = 0;
  for (int l : ls) {
    current = hamming_neighborhood(current, l - reached);
    reached = l;
    const double exact = product_probability(letter, current);
    const BlowupBound bound = blowing_up_bound(prob_base, a.n, l);
    output.csv_row(std::to_string(l) + "," + format_number(exact) + "," +
                   format_number(bound.value) + "," +
                   (bound.vacuous ? "1" : "0"));
  }

  const BlowupParams params = compute_l_n(a.n, a.epsilon, b);
  output.summary("l_n " + std::to_string(params.l_n));
  output.summary("eps_prime " + format_number(params.eps_prime));
  output.summary("penalty_factor_log " +
                 format_number(penalty_factor_log(a.n, params.l_n,
                                                  a.alphabet_size, a.p_floor)));
  output.finish();
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  std::string config_path;
  std::string n_list;
  std::uint64_t trials = 100000;
  bool exact = false;
  double target_alpha = -1.0;
  std::uint64_t seed = 0;
  int blowup_l = 0;
  std::string out;
};

Encoder encoder_from_config(const nlohmann::json& cfg, const JointPmf& source,
                            const Dmc& dmc, int n, std::uint64_t seed) {
  const std::string kind =
      cfg.contains("kind") ? cfg["kind"].get<std::string>() : "identity";
  if (kind == "identity") {
    if (!(source.row_alphabet().size == dmc.input_size())) {
      throw std::invalid_argument("identity encoder needs |X| = |U|");
    }
    CondPmf ident(source.row_alphabet(), dmc.transition.input_alphabet(),
                  Matrix::Identity(dmc.input_size(), dmc.input_size()));
    return Encoder::symbolwise(std::move(ident), n);
  }
  if (kind == "symbolwise") {
    Matrix m(cfg["map"].size(), cfg["map"][0].size());
    for (std::size_t r = 0; r < cfg["map"].size(); ++r) {
      for (std::size_t c = 0; c < cfg["map"][r].size(); ++c) {
        m(r, c) = cfg["map"][r][c].get<double>();
      }
    }
    return Encoder::symbolwise(CondPmf(source.row_alphabet(),
                                       dmc.transition.input_alphabet(),
                                       std::move(m)),
                               n);
  }
  if (kind == "codebook") {
    Matrix m(cfg["aux"].size(), cfg["aux"][0].size());
    for (std::size_t r = 0; r < cfg["aux"].size(); ++r) {
      for (std::size_t c = 0; c < cfg["aux"][r].size(); ++c) {
        m(r, c) = cfg["aux"][r][c].get<double>();
      }
    }
    AuxChannel aux(CondPmf(source.row_alphabet(),
                           Alphabet(static_cast<int>(m.cols())), std::move(m)));
    const int codewords =
        cfg.contains("codewords") ? cfg["codewords"].get<int>() : 8;
    const Pmf input_dist = capacity(dmc).input_dist;
    return Encoder::codebook(source, aux, input_dist, codewords, n, seed);
  }
  throw std::invalid_argument("encoder kind must be identity, symbolwise or "
                              "codebook");
}

int run_simulate(const SimulateArgs& a) {
  ordered_json cfg{{"subcommand", "simulate"},
                   {"config", a.config_path},
                   {"n_list", a.n_list},
                   {"trials", a.trials},
                   {"exact", a.exact},
                   {"target_alpha", a.target_alpha},
                   {"seed", a.seed},
                   {"blowup_l", a.blowup_l},
                   {"out", a.out}};
  emit_config(cfg, a.out);

  std::ifstream in(a.config_path);
  if (!in) throw std::invalid_argument("cannot open " + a.config_path);
  nlohmann::json instance_cfg;
  in >> instance_cfg;

  const Document doc = parse_document(instance_cfg.dump());
  if (!doc.joint || !doc.channel) {
    throw std::invalid_argument("simulate config needs joint and channel");
  }
  const JointPmf source = *doc.joint;
  const Dmc dmc(*doc.channel);
  double target = a.target_alpha;
  if (target < 0.0) {
    target = instance_cfg.contains("target_alpha")
                 ? instance_cfg["target_alpha"].get<double>()
                 : 0.3;
  }

  Output output;
  output.out_path = a.out;
  output.csv_row("n,alpha,beta,beta_exponent,method,ci");
  for (int n : parse_int_list(a.n_list, "--n-list")) {
    Encoder enc = encoder_from_config(
        instance_cfg.contains("encoder") ? instance_cfg["encoder"]
                                         : nlohmann::json::object(),
        source, dmc, n, a.seed);
    const bool codebook = enc.kind() == Encoder::Kind::kCodebook;
    TestInstance probe(source, dmc, n, std::move(enc), DecisionRule{});
    probe.rule = codebook
                     ? tune_threshold_mc(probe, target,
                                         std::min<std::uint64_t>(a.trials,
                                                                 1u << 17),
                                         a.seed + 1)
                     : tune_threshold(probe, target);
    if (a.blowup_l > 0) {
      probe.rule = blow_up_rule(materialize(probe), a.blowup_l);
    }
    const ErrorEstimate est =
        a.exact ? exact_errors(probe)
                : monte_carlo_errors(probe, a.trials,
                                     a.seed + static_cast<std::uint64_t>(n));
    const bool exact = est.method == ErrorEstimate::Method::kExact;
    output.csv_row(
        std::to_string(n) + "," + format_number(est.alpha) + "," +
        format_number(est.beta) + "," +
        (std::isinf(est.beta_exponent) ? "inf"
                                       : format_number(est.beta_exponent)) +
        "," + (exact ? "exact" : "mc") + "," +
        format_number(est.ci_halfwidth));
  }
  output.finish();
  return 0;
}

// ---- verify ----

struct VerifyArgs {
  int n = 4;
  double epsilon = 0.3;
  double source_p = 0.1;
  double channel_p = 0.1;
  std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& a) {
  ordered_json cfg{{"subcommand", "verify"}, {"n", a.n},
                   {"epsilon", a.epsilon},   {"source_p", a.source_p},
                   {"channel_p", a.channel_p}, {"seed", a.seed}};
  emit_config(cfg, "");

  bool all_pass = true;
  auto report = [&](const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    all_pass = all_pass && pass;
  };

  const JointPmf source = make_dsbs(a.source_p);
  const Dmc dmc = make_bsc(a.channel_p);
  const double gamma = (1.0 - a.epsilon) / 2.0;

  auto make_instance = [&](int n) {
    CondPmf ident = CondPmf::identity(Alphabet(2));
    TestInstance inst(source, dmc, n, Encoder::symbolwise(std::move(ident), n),
                      DecisionRule{});
    inst.rule = tune_threshold(inst, a.epsilon);
    return inst;
  };

  TestInstance demo = make_instance(a.n);
  const ErrorEstimate errors = exact_errors(demo);
  report("type-i-constraint", errors.alpha <= a.epsilon + 1e-12,
         "alpha=" + format_number(errors.alpha) +
             " <= " + format_number(a.epsilon));

  const ReliableSet reliable = reliable_set(demo, gamma);
  const double prob_lb = (1.0 - a.epsilon) / (1.0 + a.epsilon);
  report("reliable-set-bound", reliable.prob_h0 >= prob_lb - 1e-12,
         "P(B)=" + format_number(reliable.prob_h0) +
             " >= " + format_number(prob_lb));

  const auto [trunc, trunc_report] = truncated_measure(demo, reliable,
                                                       a.epsilon);
  report("marginal-domination-v", trunc_report.v_dominated,
         "max_ratio=" + format_number(trunc_report.max_v_ratio) +
             " limit=" + format_number(trunc_report.domination_limit));
  report("marginal-domination-y", trunc_report.y_dominated,
         "max_ratio=" + format_number(trunc_report.max_y_ratio) +
             " limit=" + format_number(trunc_report.domination_limit));
  report("divergence-cost",
         trunc_report.kl_bounded && trunc_report.kl_identity_gap <= 1e-9,
         "kl=" + format_number(trunc_report.kl) +
             " identity_gap=" + format_number(trunc_report.kl_identity_gap));
  report("markov-chain", trunc_report.markov_cmi <= 1e-9,
         "cmi=" + format_number(trunc_report.markov_cmi));

  // Blow-up direction and the multiplicative type-II penalty.
  {
    const BlowupParams params = compute_l_n(a.n, a.epsilon,
                                            std::log(static_cast<double>(a.n)));
    const int l = std::min(params.l_n, a.n);
    TestInstance blown(demo.source, demo.dmc, demo.n, demo.encoder,
                       blow_up_rule(materialize(demo), l));
    const ErrorEstimate blown_errors = exact_errors(blown);
    const double penalty = penalty_factor_log(a.n, l, dmc.output_size(),
                                              dmc.p_floor);
    const bool direction = blown_errors.alpha <= errors.alpha + 1e-12 &&
                           blown_errors.beta >= errors.beta - 1e-12;
    report("blowup-direction", direction,
           "l=" + std::to_string(l) +
               " alpha=" + format_number(blown_errors.alpha) +
               " beta=" + format_number(blown_errors.beta));
    report("penalty-bound",
           blown_errors.beta <= errors.beta * std::exp(penalty) + 1e-12,
           "beta_blown=" + format_number(blown_errors.beta) +
               " cap=" + format_number(errors.beta * std::exp(penalty)));
  }

  // Strong-converse ceiling over a short blocklength ladder.
  {
    std::vector<TestInstance> ladder;
    for (int n : {4, 6, 8, 10}) ladder.push_back(make_instance(n));
    const ExponentFit fit = exponent_estimate(ladder, EstimatorOptions{});
    const double cap = capacity(dmc).value;
    const ExponentResult ex =
        theta(source, cap, default_mu_grid(), 32, a.seed);
    const ConverseReport conv = converse_check(fit.slope, ex.theta, 0.05);
    report("converse-ceiling", conv.pass,
           "slope=" + format_number(fit.slope) +
               " theta=" + format_number(ex.theta) + " margin=" +
               format_number(conv.margin));
  }

  return all_pass ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"testing-against-independence exponents over noisy channels"};
  app.require_subcommand(1);

  CapacityArgs cap_args;
  CLI::App* cap_cmd =
      app.add_subcommand("capacity", "DMC capacity with certified gap");
  cap_cmd->add_option("--channel", cap_args.channel_path, "channel document")
      ->required();
  cap_cmd->add_option("--tol", cap_args.tol, "termination gap (nats)");
  cap_cmd->add_flag("--bits", cap_args.bits, "display in bits");

  ExponentArgs exp_args;
  CLI::App* exp_cmd =
      app.add_subcommand("exponent", "optimal type-II exponent theta");
  exp_cmd->add_option("--source", exp_args.source_path, "source document")
      ->required();
  exp_cmd->add_option("--channel", exp_args.channel_path,
                      "channel document (derives C)");
  exp_cmd->add_option("--capacity", exp_args.capacity_nats, "capacity (nats)");
  exp_cmd->add_option("--mu-grid", exp_args.mu_grid, "lo:hi:count or list");
  exp_cmd->add_option("--restarts", exp_args.restarts, "solver restarts");
  exp_cmd->add_option("--seed", exp_args.seed, "rng seed");
  exp_cmd->add_flag("--oracle", exp_args.oracle, "also run the grid scan");
  exp_cmd->add_option("--grid-step", exp_args.grid_step, "oracle step");
  exp_cmd->add_flag("--bits", exp_args.bits, "display in bits");
  exp_cmd->add_option("--out", exp_args.out, "mu-trace CSV path");

  RegionArgs reg_args;
  CLI::App* reg_cmd =
      app.add_subcommand("region", "theta-vs-capacity tradeoff curve");
  reg_cmd->add_option("--source", reg_args.source_path, "source document")
      ->required();
  reg_cmd->add_option("--capacity-grid", reg_args.capacity_grid,
                      "lo:hi:count or list");
  reg_cmd->add_option("--mu-grid", reg_args.mu_grid, "lo:hi:count or list");
  reg_cmd->add_option("--restarts", reg_args.restarts, "solver restarts");
  reg_cmd->add_option("--seed", reg_args.seed, "rng seed");
  reg_cmd->add_option("--out", reg_args.out, "CSV path");

  BlowupArgs blow_args;
  CLI::App* blow_cmd =
      app.add_subcommand("blowup", "Hamming blow-up probabilities and bounds");
  blow_cmd->add_option("--n", blow_args.n, "blocklength")->required();
  blow_cmd->add_option("--alphabet-size", blow_args.alphabet_size, "|Z|");
  blow_cmd->add_option("--set", blow_args.set_spec,
                       "file of indices or random:p,seed");
  blow_cmd->add_option("--l", blow_args.l_spec, "radius or 'sweep'");
  blow_cmd->add_option("--epsilon", blow_args.epsilon, "type-I budget");
  blow_cmd->add_option("--b", blow_args.b, "b(n); default ln n");
  blow_cmd->add_option("--pmf", blow_args.pmf, "letter pmf (default uniform)");
  blow_cmd->add_option("--p-floor", blow_args.p_floor,
                       "channel p-floor for the penalty factor");
  blow_cmd->add_option("--out", blow_args.out, "CSV path");

  SimulateArgs sim_args;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "finite-blocklength error estimates");
  sim_cmd->add_option("--config", sim_args.config_path, "instance document")
      ->required();
  sim_cmd->add_option("--n-list", sim_args.n_list, "blocklengths")->required();
  sim_cmd->add_option("--trials", sim_args.trials, "Monte-Carlo trials");
  sim_cmd->add_flag("--exact", sim_args.exact, "exact enumeration");
  sim_cmd->add_option("--target-alpha", sim_args.target_alpha,
                      "type-I target for threshold tuning");
  sim_cmd->add_option("--seed", sim_args.seed, "rng seed");
  sim_cmd->add_option("--blowup-l", sim_args.blowup_l, "blow regions up by l");
  sim_cmd->add_option("--out", sim_args.out, "CSV path");

  VerifyArgs ver_args;
  CLI::App* ver_cmd = app.add_subcommand(
      "verify", "proof-construction checks on the bundled demo instance");
  ver_cmd->add_option("--n", ver_args.n, "demo blocklength");
  ver_cmd->add_option("--epsilon", ver_args.epsilon, "type-I budget");
  ver_cmd->add_option("--source-p", ver_args.source_p, "DSBS flip prob");
  ver_cmd->add_option("--channel-p", ver_args.channel_p, "BSC crossover");
  ver_cmd->add_option("--seed", ver_args.seed, "rng seed");

  std::vector<const char*> argv;
  argv.push_back("noisyht");
  for (const std::string& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cap_cmd->parsed()) return run_capacity(cap_args);
    if (exp_cmd->parsed()) return run_exponent(exp_args);
    if (reg_cmd->parsed()) return run_region(reg_args);
    if (blow_cmd->parsed()) return run_blowup(blow_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (ver_cmd->parsed()) return run_verify(ver_args);
  } catch (const SizeCapError& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace noisyht::cli
