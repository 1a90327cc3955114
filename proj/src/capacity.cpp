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

#include "noisyht/capacity.hpp"

#include <cmath>
#include <limits>

namespace noisyht {

namespace {
constexpr int kMaxIterations = 100000;
}

Dmc::Dmc(CondPmf t) : transition(std::move(t)), p_floor(0.0) {
  double floor = std::numeric_limits<double>::infinity();
  const Matrix& m = transition.rows();
  for (int x = 0; x < m.rows(); ++x) {
    for (int y = 0; y < m.cols(); ++y) {
      if (m(x, y) > 0.0 && m(x, y) < floor) floor = m(x, y);
    }
  }
  p_floor = floor;  // every row sums to 1, so a positive entry exists
}

double min_positive_transition(const Dmc& dmc) { return dmc.p_floor; }

CapacityResult capacity(const Dmc& dmc, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("capacity: tol must be > 0");
  const Matrix& w = dmc.transition.rows();
  const int nx = static_cast<int>(w.rows());
  const int ny = static_cast<int>(w.cols());

  // Precompute -H(Y|X=x) = sum_y w ln w, reused every iteration.
  Vector row_neg_entropy = Vector::Zero(nx);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double p = w(x, y);
      if (p > 0.0) row_neg_entropy(x) += p * std::log(p);
    }
  }

  // Log-domain input distribution, started uniform.
  Vector log_r = Vector::Constant(nx, -std::log(static_cast<double>(nx)));
  std::vector<double> trace;

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    Vector r = (log_r.array() - log_r.maxCoeff()).exp();
    r /= r.sum();

    Vector q = w.transpose() * r;  // output law under r

    // D_x = KL(W(.|x) || q); lower bound = sum r D_x, upper = max D_x.
    Vector d = row_neg_entropy;
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) {
        if (w(x, y) > 0.0) d(x) -= w(x, y) * std::log(q(y));
      }
    }
    const double lower = r.dot(d);
    const double upper = d.maxCoeff();
    trace.push_back(lower);

    if (upper - lower <= tol) {
      return CapacityResult{lower,
                            Pmf(dmc.transition.input_alphabet(), std::move(r)),
                            iter, upper - lower, std::move(trace)};
    }

    log_r += d;  // multiplicative update r <- r exp(D_x), renormalized above
  }
  throw std::runtime_error(
      "capacity: iteration cap breached; channel likely malformed");
}

double closed_form_capacity(ChannelFamily family, double param) {
  if (param < 0.0 || param > 1.0) {
    throw std::invalid_argument("closed_form_capacity: parameter outside [0,1]");
  }
  const double ln2 = std::log(2.0);
  switch (family) {
    case ChannelFamily::kBsc:
      return ln2 - binary_entropy(param);
    case ChannelFamily::kBec:
      return (1.0 - param) * ln2;
  }
  throw std::invalid_argument("closed_form_capacity: unknown family");
}

Dmc make_bsc(double crossover) {
  if (crossover < 0.0 || crossover > 1.0) {
    throw std::invalid_argument("make_bsc: crossover outside [0,1]");
  }
  Matrix m(2, 2);
  m << 1.0 - crossover, crossover, crossover, 1.0 - crossover;
  return Dmc(CondPmf(Alphabet(2), Alphabet(2), std::move(m)));
}

Dmc make_bec(double erasure) {
  if (erasure < 0.0 || erasure > 1.0) {
    throw std::invalid_argument("make_bec: erasure outside [0,1]");
  }
  Matrix m(2, 3);
  m << 1.0 - erasure, erasure, 0.0, 0.0, erasure, 1.0 - erasure;
  return Dmc(CondPmf(Alphabet(2), Alphabet(3, {"0", "?", "1"}), std::move(m)));
}

}  // namespace noisyht
