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

#include "noisyht/probcore.hpp"

#include "noisyht/rng.hpp"
#include "noisyht/simulator.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace noisyht;
using namespace noisyht::testing;

namespace {

Pmf binary(double p0) {
  Vector v(2);
  v << p0, 1.0 - p0;
  return Pmf(Alphabet(2), v);
}

CondPmf bsc_cond(double p) {
  Matrix m(2, 2);
  m << 1.0 - p, p, p, 1.0 - p;
  return CondPmf(Alphabet(2), Alphabet(2), m);
}

}  // namespace

TEST_CASE("entropy anchors") {
  CHECK(entropy(Pmf::uniform(Alphabet(2))) == doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(entropy(Pmf::point_mass(Alphabet(4), 2)) == 0.0);
  CHECK(entropy(binary(0.1)) ==
        doctest::Approx(0.3250829733914482).epsilon(1e-12));
}

TEST_CASE("mutual information anchors") {
  const Pmf u = binary(0.3);
  const Pmf v = binary(0.6);
  CHECK(mutual_information(product(u, v)) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix coupling(2, 2);
  coupling << 0.5, 0.0, 0.0, 0.5;
  CHECK(mutual_information(JointPmf(Alphabet(2), Alphabet(2), coupling)) ==
        doctest::Approx(kLn2).epsilon(1e-12));

  CHECK(mutual_information(make_dsbs(0.1)) ==
        doctest::Approx(0.3680642071684971).epsilon(1e-10));
  // symmetric under transpose
  CHECK(mutual_information(make_dsbs(0.1).transposed()) ==
        doctest::Approx(mutual_information(make_dsbs(0.1))).epsilon(1e-12));
}

TEST_CASE("kl divergence anchors and support handling") {
  const Pmf p = binary(0.5);
  CHECK(kl_divergence(p, p) == 0.0);

  CHECK(kl_divergence(binary(1.0), binary(0.5)) ==
        doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(std::isinf(kl_divergence(binary(0.5), binary(1.0))));
  CHECK_THROWS_AS(kl_divergence(binary(0.5), Pmf::uniform(Alphabet(3))),
                  std::invalid_argument);
}

TEST_CASE("total variation anchors") {
  CHECK(total_variation(binary(0.5), binary(0.5)) == 0.0);
  CHECK(total_variation(binary(1.0), binary(0.0)) == doctest::Approx(1.0));
  CHECK(total_variation(binary(0.5), binary(0.9)) == doctest::Approx(0.4));
}

TEST_CASE("conditional mutual information anchors") {
  // Markov triple built by compose: I(V;W|U) = 0.
  const Joint3Pmf markov = compose(make_dsbs(0.2), bsc_cond(0.3));
  CHECK(conditional_mutual_information(markov, 0) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Uniform independent bits with C = A xor B: I(A;B|C) = ln 2.
  std::vector<double> xor_probs(8, 0.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      xor_probs[(a * 2 + b) * 2 + (a ^ b)] = 0.25;
    }
  }
  const Joint3Pmf xored(Alphabet(2), Alphabet(2), Alphabet(2), xor_probs);
  CHECK(conditional_mutual_information(xored, 2) ==
        doctest::Approx(kLn2).epsilon(1e-12));

  // Constant conditioning variable reduces to plain mutual information.
  CounterRng rng(11, 0);
  const JointPmf ab = random_joint(rng, Alphabet(3), Alphabet(2));
  std::vector<double> flat;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 2; ++b) flat.push_back(ab(a, b));
  }
  const Joint3Pmf with_const(Alphabet(3), Alphabet(2), Alphabet(1), flat);
  CHECK(conditional_mutual_information(with_const, 2) ==
        doctest::Approx(mutual_information(ab)).epsilon(1e-12));
}

TEST_CASE("compose anchors") {
  const JointPmf dsbs = make_dsbs(0.1);

  const Joint3Pmf ident = compose(dsbs, CondPmf::identity(Alphabet(2)));
  // W == U: the (U, W) marginal is the diagonal coupling.
  const JointPmf uw = ident.pair_marginal(0, 2);
  CHECK(uw(0, 0) == doctest::Approx(0.5));
  CHECK(uw(0, 1) == doctest::Approx(0.0));

  const Joint3Pmf constant =
      compose(dsbs, CondPmf::constant(Alphabet(2), Alphabet(3), 1));
  CHECK(mutual_information(constant.pair_marginal(0, 2)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mutual_information(constant.pair_marginal(1, 2)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // DSBS(0.1) through a BSC(0.2) auxiliary.
  const Joint3Pmf mixed = compose(dsbs, bsc_cond(0.2));
  CHECK(mutual_information(mixed.pair_marginal(0, 2)) ==
        doctest::Approx(0.19274475702175742).epsilon(1e-10));
  CHECK(mutual_information(mixed.pair_marginal(1, 2)) ==
        doctest::Approx(0.12009026342852491).epsilon(1e-10));

  CounterRng rng(1, 0);
  CHECK_THROWS_AS(compose(dsbs, random_cond(rng, Alphabet(3), Alphabet(2))),
                  std::invalid_argument);
}

TEST_CASE("marginals, condition, product") {
  const Pmf p = binary(0.3);
  const Pmf q = binary(0.5);
  const JointPmf prod = product(p, q);
  CHECK(prod(0, 0) == doctest::Approx(0.15));
  CHECK(prod(1, 0) == doctest::Approx(0.35));

  const auto [mp, mq] = marginals(prod);
  CHECK(mp(0) == doctest::Approx(0.3));
  CHECK(mq(1) == doctest::Approx(0.5));

  Matrix coupling(2, 2);
  coupling << 0.5, 0.0, 0.0, 0.5;
  const JointPmf ident(Alphabet(2), Alphabet(2), coupling);
  const Pmf cond0 = condition(ident, 0);
  CHECK(cond0(0) == doctest::Approx(1.0));

  Matrix degenerate(2, 2);
  degenerate << 0.5, 0.5, 0.0, 0.0;
  CHECK_THROWS_AS(condition(JointPmf(Alphabet(2), Alphabet(2), degenerate), 1),
                  std::invalid_argument);
}

TEST_CASE("validation rejects malformed inputs") {
  Vector bad(2);
  bad << 0.6, 0.6;
  CHECK_THROWS_AS(Pmf(Alphabet(2), bad), std::invalid_argument);
  Vector negative(2);
  negative << -0.1, 1.1;
  CHECK_THROWS_AS(Pmf(Alphabet(2), negative), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet(2, {"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet(0), std::invalid_argument);
  // Within-tolerance mass is accepted.
  Vector near_mass(2);
  near_mass << 0.5, 0.5 + 5e-10;
  CHECK_NOTHROW(Pmf(Alphabet(2), near_mass));
}

TEST_CASE("information inequalities on random inputs") {
  CounterRng rng(2024, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const Alphabet ua(2 + static_cast<int>(rng.next_u64() % 3));
    const Alphabet va(2 + static_cast<int>(rng.next_u64() % 3));
    const JointPmf joint = random_joint(rng, ua, va);
    const CondPmf aux = random_cond(rng, ua, Alphabet(ua.size + 1));

    CHECK(mutual_information(joint) >= -1e-12);
    const auto [pu, pv] = marginals(joint);
    CHECK(entropy(pu) >= 0.0);

    // Data processing on the Markov chain V-U-W.
    const Joint3Pmf uvw = compose(joint, aux);
    const double i_uw = mutual_information(uvw.pair_marginal(0, 2));
    const double i_vw = mutual_information(uvw.pair_marginal(1, 2));
    CHECK(i_vw <= i_uw + 1e-10);
    CHECK(i_vw <= mutual_information(joint) + 1e-10);

    // Pinsker on a same-support pair.
    const JointPmf other = random_joint(rng, ua, va);
    const double kl = kl_divergence(joint, other);
    if (std::isfinite(kl)) {
      CHECK(total_variation(joint, other) <= std::sqrt(kl / 2.0) + 1e-12);
    }

    // compose then marginalize over W recovers the source exactly.
    const JointPmf back = uvw.pair_marginal(0, 1);
    CHECK((back.probs() - joint.probs()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("chain rule I(A,B;C) = I(A;C) + I(B;C|A)") {
  CounterRng rng(77, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const Joint3Pmf j =
        random_joint3(rng, Alphabet(2), Alphabet(3), Alphabet(2));
    const double lhs = mutual_information(j.grouped_vs(0, 1));
    const double rhs = mutual_information(j.pair_marginal(0, 2)) +
                       conditional_mutual_information(j, 0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}
