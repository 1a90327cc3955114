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
#include "noisyht/io.hpp"

#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace noisyht;

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("noisyht_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

// Runs the CLI with stdout captured to a file so test logs stay clean.
int run_quiet(const std::vector<std::string>& args, const std::string& sink) {
  std::fflush(stdout);
  const int saved = ::dup(::fileno(stdout));
  REQUIRE(saved >= 0);
  REQUIRE(std::freopen(sink.c_str(), "w", stdout) != nullptr);
  const int code = cli::run(args);
  std::fflush(stdout);
  ::dup2(saved, ::fileno(stdout));
  ::close(saved);
  return code;
}

const char* kBscDoc = R"({
  "alphabets": {"x": 2, "y": 2},
  "channel": [[0.9, 0.1], [0.1, 0.9]]
})";

const char* kDsbsDoc = R"({
  "alphabets": {"u": 2, "v": 2},
  "joint": [["0.45", "0.05"], ["0.05", "0.45"]]
})";

}  // namespace

TEST_CASE("document parse, serialize, reload") {
  const Document doc = parse_document(kDsbsDoc);
  REQUIRE(doc.joint.has_value());
  CHECK(doc.joint->probs()(0, 0) == doctest::Approx(0.45));

  const std::string text = serialize_document(doc);
  const Document again = parse_document(text);
  CHECK(serialize_document(again) == text);  // fixed point

  CHECK_THROWS_AS(parse_document("not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_document("{\"joint\": [[0.5, 0.6]]}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_document("/nonexistent/file.json"),
                  std::invalid_argument);
}

TEST_CASE("number formatting is plain and precise") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0) == "1");
  const double value = 0.36806420716849705;
  CHECK(std::stod(format_number(value)) == value);
  CHECK(format_number(value).find(',') == std::string::npos);
}

TEST_CASE("cli capacity runs and validates") {
  TempDir tmp;
  std::ofstream(tmp.path("bsc.json")) << kBscDoc;

  CHECK(run_quiet({"capacity", "--channel", tmp.path("bsc.json")},
                  tmp.path("out.txt")) == 0);
  const std::string out = slurp(tmp.path("out.txt"));
  CHECK(out.find("capacity_nats 0.3680642") != std::string::npos);
  CHECK(out.find("p_floor 0.1") != std::string::npos);

  CHECK(run_quiet({"capacity", "--channel", tmp.path("missing.json")},
                  tmp.path("out2.txt")) == 1);
  CHECK(run_quiet({"capacity"}, tmp.path("out3.txt")) == 1);
}

TEST_CASE("cli exponent, size-cap refusal exit code") {
  TempDir tmp;
  std::ofstream(tmp.path("dsbs.json")) << kDsbsDoc;
  std::ofstream(tmp.path("wide.json"))
      << R"({"joint": [[0.2,0.1,0.05],[0.1,0.2,0.05],[0.05,0.05,0.2]]})";

  CHECK(run_quiet({"exponent", "--source", tmp.path("dsbs.json"),
                   "--capacity", "0.3466", "--mu-grid", "0.1:10:12",
                   "--restarts", "8"},
                  tmp.path("out.txt")) == 0);

  // 3x3 source with a tiny oracle step projects far beyond the cap.
  CHECK(run_quiet({"exponent", "--source", tmp.path("wide.json"),
                   "--capacity", "0.3", "--mu-grid", "1", "--restarts", "2",
                   "--oracle", "--grid-step", "0.01"},
                  tmp.path("out2.txt")) == 2);

  // both capacity sources given
  CHECK(run_quiet({"exponent", "--source", tmp.path("dsbs.json"),
                   "--capacity", "0.3", "--channel", tmp.path("dsbs.json")},
                  tmp.path("out3.txt")) == 1);
}

TEST_CASE("cli region emits deterministic header-first csv") {
  TempDir tmp;
  std::ofstream(tmp.path("dsbs.json")) << kDsbsDoc;

  const std::vector<std::string> args = {
      "region",       "--source", tmp.path("dsbs.json"),
      "--capacity-grid", "0:0.6931:4", "--mu-grid", "0.1:10:10",
      "--restarts",   "6",        "--out", tmp.path("region.csv")};
  CHECK(run_quiet(args, tmp.path("log1.txt")) == 0);
  const std::string first = slurp(tmp.path("region.csv"));

  std::vector<std::string> again = args;
  again.back() = tmp.path("region2.csv");
  CHECK(run_quiet(again, tmp.path("log2.txt")) == 0);
  const std::string second = slurp(tmp.path("region2.csv"));

  CHECK(first == second);
  CHECK(first.rfind("capacity_nats,theta_nats,best_mu\n", 0) == 0);
  CHECK(fs::exists(tmp.path("region.csv") + ".config.json"));
}

TEST_CASE("cli blowup sweep") {
  TempDir tmp;
  CHECK(run_quiet({"blowup", "--n", "6", "--alphabet-size", "2", "--set",
                   "random:0.4,7", "--l", "sweep", "--epsilon", "0.5",
                   "--p-floor", "0.1", "--out", tmp.path("blow.csv")},
                  tmp.path("log.txt")) == 0);
  const std::string csv = slurp(tmp.path("blow.csv"));
  CHECK(csv.rfind("l,exact_prob,lemma_bound,vacuous_flag\n", 0) == 0);
  // 7 data rows for l = 0..6
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 8);
  const std::string log = slurp(tmp.path("log.txt"));
  CHECK(log.find("penalty_factor_log") != std::string::npos);
}

TEST_CASE("cli simulate exact and monte carlo are deterministic") {
  TempDir tmp;
  std::ofstream(tmp.path("instance.json")) << R"({
    "joint": [[0.45, 0.05], [0.05, 0.45]],
    "channel": [[0.9, 0.1], [0.1, 0.9]],
    "encoder": {"kind": "identity"},
    "target_alpha": 0.3
  })";

  const std::vector<std::string> args = {
      "simulate", "--config", tmp.path("instance.json"), "--n-list", "2,4,6",
      "--trials", "20000",    "--seed", "11", "--out", tmp.path("sim.csv")};
  CHECK(run_quiet(args, tmp.path("log1.txt")) == 0);
  std::vector<std::string> again = args;
  again.back() = tmp.path("sim2.csv");
  CHECK(run_quiet(again, tmp.path("log2.txt")) == 0);
  CHECK(slurp(tmp.path("sim.csv")) == slurp(tmp.path("sim2.csv")));
  CHECK(slurp(tmp.path("sim.csv"))
            .rfind("n,alpha,beta,beta_exponent,method,ci\n", 0) == 0);

  CHECK(run_quiet({"simulate", "--config", tmp.path("instance.json"),
                   "--n-list", "4", "--exact", "--out", tmp.path("ex.csv")},
                  tmp.path("log3.txt")) == 0);
  CHECK(slurp(tmp.path("ex.csv")).find("exact") != std::string::npos);
}

TEST_CASE("cli verify passes on the bundled demo") {
  TempDir tmp;
  CHECK(run_quiet({"verify"}, tmp.path("ledger.txt")) == 0);
  const std::string ledger = slurp(tmp.path("ledger.txt"));
  CHECK(ledger.find("[PASS] reliable-set-bound") != std::string::npos);
  CHECK(ledger.find("[FAIL]") == std::string::npos);
}
