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

#ifndef NOISYHT_CAPACITY_HPP
#define NOISYHT_CAPACITY_HPP

#include "noisyht/probcore.hpp"

namespace noisyht {

/// Discrete memoryless channel X -> Y with its smallest positive transition
/// probability cached (the blow-up penalty depends on it).
struct Dmc {
  CondPmf transition;
  double p_floor;

  explicit Dmc(CondPmf t);

  int input_size() const { return transition.input_alphabet().size; }
  int output_size() const { return transition.output_alphabet().size; }
};

double min_positive_transition(const Dmc& dmc);

struct CapacityResult {
  double value;  // nats
  Pmf input_dist;
  int iterations;
  double gap;  // upper - lower bound at termination
  std::vector<double> lower_bound_trace;
};

/// Alternating-maximization capacity solve with per-iteration two-sided
/// bounds; terminates when upper - lower <= tol. The returned input
/// distribution achieves the lower bound.
CapacityResult capacity(const Dmc& dmc, double tol = 1e-9);

enum class ChannelFamily { kBsc, kBec };

/// ln2 - h(p) for BSC, (1-e) ln2 for BEC; parameter must lie in [0,1].
double closed_form_capacity(ChannelFamily family, double param);

Dmc make_bsc(double crossover);
/// Output alphabet {0, erased, 1}.
Dmc make_bec(double erasure);

}  // namespace noisyht

#endif  // NOISYHT_CAPACITY_HPP
