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

#ifndef NOISYHT_EXPONENT_HPP
#define NOISYHT_EXPONENT_HPP

#include "noisyht/probcore.hpp"

#include <cstdint>
#include <vector>

namespace noisyht {

/// Auxiliary test channel U -> W. The working cardinality is pinned at
/// |W| = |U| + 1; smaller optima are representable by repeated columns.
struct AuxChannel {
  CondPmf cond;

  explicit AuxChannel(CondPmf c);

  /// W = U, padded with one unused output symbol.
  static AuxChannel identity_padded(const Alphabet& u);
  /// W constant, independent of U.
  static AuxChannel constant(const Alphabet& u);
};

struct ThetaMuResult {
  double value = 0.0;
  AuxChannel argmax;
};

/// Hyperplane value theta_mu = sup over P_{W|U} of I(V;W) + mu (C - I(U;W)).
/// Multi-restart row-wise exponentiated ascent; the two deterministic
/// candidates W=U and W=const are always evaluated, so the returned value
/// dominates both. Deterministic given (inputs, seed).
ThetaMuResult theta_mu(const JointPmf& source, double dmc_capacity, double mu,
                       int restarts = 64, std::uint64_t seed = 0);

struct ExponentResult {
  enum class Method { kLagrangian, kBruteForce };
  double theta = 0.0;
  double best_mu = 0.0;
  AuxChannel best_aux;
  std::vector<std::pair<double, double>> mu_trace;  // (mu, theta_mu)
  Method method = Method::kLagrangian;
};

std::vector<double> log_spaced_grid(double lo, double hi, int count);
std::vector<double> default_mu_grid();  // 40 log-spaced points in [1e-2, 1e2]

/// theta = min over the mu grid of theta_mu, additionally capped by the
/// data-processing ceilings I(U;V) and C (both are valid upper bounds on
/// theta and are needed to close the grid at its ends).
ExponentResult theta(const JointPmf& source, double dmc_capacity,
                     const std::vector<double>& mu_grid, int restarts = 64,
                     std::uint64_t seed = 0);

/// Exhaustive scan over per-row simplex grids of P_{W|U}; keeps candidates
/// with I(U;W) <= C + 1e-12 and returns max I(V;W). Lower-bounds theta.
/// Refuses scans projected above 1e8 candidates.
double theta_direct(const JointPmf& source, double dmc_capacity,
                    double grid_step);

struct TradeoffRegion {
  struct Point {
    double capacity = 0.0;
    double theta = 0.0;
    double best_mu = 0.0;
  };
  std::vector<Point> points;
  /// Largest downward correction applied by the running-max guard.
  double max_monotonicity_fix = 0.0;
};

TradeoffRegion region(const JointPmf& source,
                      const std::vector<double>& capacity_grid,
                      const std::vector<double>& mu_grid, int restarts = 64,
                      std::uint64_t seed = 0);

/// Single-letter bound value: max over full joints P on U x V x W of
///   I(V;W) + mu C - mu I(U;W) - (nu+mu) I(V;W|U) - (nu+mu) D(P_UV~ || P_UV),
/// with |W| = |U|+1, by multi-restart projected gradient ascent. The
/// candidate P_UV x (theta_mu argmax) is always evaluated, which makes the
/// result dominate theta_mu and hence theta.
double r_s_mu_nu(const JointPmf& source, double dmc_capacity, double mu,
                 double nu, int restarts = 16, std::uint64_t seed = 0);

}  // namespace noisyht

#endif  // NOISYHT_EXPONENT_HPP
