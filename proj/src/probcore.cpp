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

#include <cmath>
#include <limits>
#include <unordered_set>

namespace noisyht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_mass(const char* what, double sum) {
  if (std::abs(sum - 1.0) > kMassTol) {
    throw std::invalid_argument(std::string(what) + ": mass " +
                                std::to_string(sum) + " not 1 within 1e-9");
  }
}

void check_nonneg(const char* what, double min_entry) {
  if (min_entry < 0.0) {
    throw std::invalid_argument(std::string(what) + ": negative entry");
  }
}

}  // namespace

Alphabet::Alphabet(int n) : size(n) {
  if (n < 1) throw std::invalid_argument("Alphabet: size must be >= 1");
}

Alphabet::Alphabet(int n, std::vector<std::string> names)
    : size(n), labels(std::move(names)) {
  if (n < 1) throw std::invalid_argument("Alphabet: size must be >= 1");
  if (!labels.empty()) {
    if (static_cast<int>(labels.size()) != n) {
      throw std::invalid_argument("Alphabet: label count != size");
    }
    std::unordered_set<std::string> seen(labels.begin(), labels.end());
    if (static_cast<int>(seen.size()) != n) {
      throw std::invalid_argument("Alphabet: duplicate labels");
    }
  }
}

std::string Alphabet::label(int symbol) const {
  if (symbol < 0 || symbol >= size) {
    throw std::out_of_range("Alphabet: symbol out of range");
  }
  return labels.empty() ? std::to_string(symbol) : labels[symbol];
}

Pmf::Pmf(Alphabet alphabet, Vector probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  if (probs_.size() != alphabet_.size) {
    throw std::invalid_argument("Pmf: length != alphabet size");
  }
  check_nonneg("Pmf", probs_.minCoeff());
  check_mass("Pmf", probs_.sum());
}

Pmf Pmf::normalized() const {
  const double s = probs_.sum();
  if (s <= 0.0) throw std::invalid_argument("Pmf: cannot normalize zero mass");
  return Pmf(alphabet_, probs_ / s);
}

Pmf Pmf::uniform(Alphabet alphabet) {
  const int n = alphabet.size;
  return Pmf(std::move(alphabet), Vector::Constant(n, 1.0 / n));
}

Pmf Pmf::point_mass(Alphabet alphabet, int symbol) {
  Vector v = Vector::Zero(alphabet.size);
  v(symbol) = 1.0;
  return Pmf(std::move(alphabet), std::move(v));
}

JointPmf::JointPmf(Alphabet row, Alphabet col, Matrix probs)
    : row_(std::move(row)), col_(std::move(col)), probs_(std::move(probs)) {
  if (probs_.rows() != row_.size || probs_.cols() != col_.size) {
    throw std::invalid_argument("JointPmf: shape mismatch");
  }
  check_nonneg("JointPmf", probs_.minCoeff());
  check_mass("JointPmf", probs_.sum());
}

JointPmf JointPmf::transposed() const {
  return JointPmf(col_, row_, probs_.transpose());
}

CondPmf::CondPmf(Alphabet input, Alphabet output, Matrix rows)
    : input_(std::move(input)), output_(std::move(output)),
      rows_(std::move(rows)) {
  if (rows_.rows() != input_.size || rows_.cols() != output_.size) {
    throw std::invalid_argument("CondPmf: shape mismatch");
  }
  check_nonneg("CondPmf", rows_.minCoeff());
  for (int i = 0; i < rows_.rows(); ++i) {
    check_mass("CondPmf row", rows_.row(i).sum());
  }
}

Pmf CondPmf::row(int in) const {
  return Pmf(output_, rows_.row(in).transpose());
}

bool CondPmf::deterministic() const {
  for (int i = 0; i < rows_.rows(); ++i) {
    if (rows_.row(i).maxCoeff() != 1.0) return false;
  }
  return true;
}

CondPmf CondPmf::identity(Alphabet a) {
  Matrix m = Matrix::Identity(a.size, a.size);
  return CondPmf(a, a, std::move(m));
}

CondPmf CondPmf::constant(Alphabet input, Alphabet output, int symbol) {
  Matrix m = Matrix::Zero(input.size, output.size);
  m.col(symbol).setOnes();
  return CondPmf(std::move(input), std::move(output), std::move(m));
}

Joint3Pmf::Joint3Pmf(Alphabet a, Alphabet b, Alphabet c,
                     std::vector<double> probs)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
      probs_(std::move(probs)) {
  const std::size_t want = static_cast<std::size_t>(a_.size) * b_.size * c_.size;
  if (probs_.size() != want) {
    throw std::invalid_argument("Joint3Pmf: length mismatch");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (p < 0.0) throw std::invalid_argument("Joint3Pmf: negative entry");
    sum += p;
  }
  check_mass("Joint3Pmf", sum);
}

const Alphabet& Joint3Pmf::alphabet(int axis) const {
  switch (axis) {
    case 0: return a_;
    case 1: return b_;
    case 2: return c_;
    default: throw std::out_of_range("Joint3Pmf: axis");
  }
}

Pmf Joint3Pmf::marginal(int axis) const {
  const Alphabet& al = alphabet(axis);
  Vector out = Vector::Zero(al.size);
  for (int i = 0; i < a_.size; ++i) {
    for (int j = 0; j < b_.size; ++j) {
      for (int k = 0; k < c_.size; ++k) {
        const int idx = axis == 0 ? i : (axis == 1 ? j : k);
        out(idx) += (*this)(i, j, k);
      }
    }
  }
  return Pmf(al, std::move(out));
}

JointPmf Joint3Pmf::pair_marginal(int axis1, int axis2) const {
  if (axis1 == axis2) throw std::invalid_argument("pair_marginal: equal axes");
  const Alphabet& r = alphabet(axis1);
  const Alphabet& c = alphabet(axis2);
  Matrix out = Matrix::Zero(r.size, c.size);
  for (int i = 0; i < a_.size; ++i) {
    for (int j = 0; j < b_.size; ++j) {
      for (int k = 0; k < c_.size; ++k) {
        const int sym[3] = {i, j, k};
        out(sym[axis1], sym[axis2]) += (*this)(i, j, k);
      }
    }
  }
  return JointPmf(r, c, std::move(out));
}

JointPmf Joint3Pmf::grouped_vs(int axis1, int axis2) const {
  int other = 3 - axis1 - axis2;
  const Alphabet& g1 = alphabet(axis1);
  const Alphabet& g2 = alphabet(axis2);
  Alphabet grouped(g1.size * g2.size);
  Matrix out = Matrix::Zero(grouped.size, alphabet(other).size);
  for (int i = 0; i < a_.size; ++i) {
    for (int j = 0; j < b_.size; ++j) {
      for (int k = 0; k < c_.size; ++k) {
        const int sym[3] = {i, j, k};
        out(sym[axis1] * g2.size + sym[axis2], sym[other]) += (*this)(i, j, k);
      }
    }
  }
  return JointPmf(std::move(grouped), alphabet(other), std::move(out));
}

namespace {

// -sum p ln p over any coefficient range
template <typename Range>
double entropy_of(const Range& r) {
  double h = 0.0;
  for (double p : r) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double entropy(const Pmf& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double v = p(i);
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double mutual_information(const JointPmf& j) {
  const auto [pu, pv] = marginals(j);
  double total = 0.0;
  for (int u = 0; u < j.rows(); ++u) {
    for (int v = 0; v < j.cols(); ++v) {
      const double p = j(u, v);
      if (p > 0.0) total += p * std::log(p / (pu(u) * pv(v)));
    }
  }
  return total;
}

namespace {

double kl_core(const double* p, const double* q, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) {
      if (q[i] <= 0.0) return kInf;
      total += p[i] * std::log(p[i] / q[i]);
    }
  }
  return total;
}

}  // namespace

double kl_divergence(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_divergence: shape mismatch");
  }
  return kl_core(p.probs().data(), q.probs().data(), p.size());
}

double kl_divergence(const JointPmf& p, const JointPmf& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw std::invalid_argument("kl_divergence: shape mismatch");
  }
  return kl_core(p.probs().data(), q.probs().data(),
                 static_cast<std::size_t>(p.rows()) * p.cols());
}

double total_variation(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("total_variation: shape mismatch");
  }
  return 0.5 * (p.probs() - q.probs()).cwiseAbs().sum();
}

double total_variation(const JointPmf& p, const JointPmf& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw std::invalid_argument("total_variation: shape mismatch");
  }
  return 0.5 * (p.probs() - q.probs()).cwiseAbs().sum();
}

double conditional_mutual_information(const Joint3Pmf& j, int cond_axis) {
  // I(A;B|C) = H(A,C) + H(B,C) - H(C) - H(A,B,C)
  const int ax1 = cond_axis == 0 ? 1 : 0;
  const int ax2 = cond_axis == 2 ? 1 : 2;
  auto joint_entropy = [](const JointPmf& m) {
    double h = 0.0;
    const double* d = m.probs().data();
    const std::size_t n = static_cast<std::size_t>(m.rows()) * m.cols();
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i] > 0.0) h -= d[i] * std::log(d[i]);
    }
    return h;
  };
  const double hac = joint_entropy(j.pair_marginal(ax1, cond_axis));
  const double hbc = joint_entropy(j.pair_marginal(ax2, cond_axis));
  const double hc = entropy(j.marginal(cond_axis));
  const double habc = entropy_of(j.flat());
  return hac + hbc - hc - habc;
}

Joint3Pmf compose(const JointPmf& source, const CondPmf& aux) {
  if (!(aux.input_alphabet() == source.row_alphabet())) {
    throw std::invalid_argument("compose: aux input != source row alphabet");
  }
  const int nu = source.rows(), nv = source.cols(),
            nw = aux.output_alphabet().size;
  std::vector<double> probs(static_cast<std::size_t>(nu) * nv * nw);
  std::size_t idx = 0;
  for (int u = 0; u < nu; ++u) {
    for (int v = 0; v < nv; ++v) {
      for (int w = 0; w < nw; ++w) {
        probs[idx++] = source(u, v) * aux(u, w);
      }
    }
  }
  return Joint3Pmf(source.row_alphabet(), source.col_alphabet(),
                   aux.output_alphabet(), std::move(probs));
}

std::pair<Pmf, Pmf> marginals(const JointPmf& j) {
  Vector row = j.probs().rowwise().sum();
  Vector col = j.probs().colwise().sum().transpose();
  return {Pmf(j.row_alphabet(), std::move(row)),
          Pmf(j.col_alphabet(), std::move(col))};
}

Pmf condition(const JointPmf& j, int row_symbol) {
  if (row_symbol < 0 || row_symbol >= j.rows()) {
    throw std::out_of_range("condition: row symbol out of range");
  }
  const double mass = j.probs().row(row_symbol).sum();
  if (mass <= 0.0) {
    throw std::invalid_argument("condition: zero-probability symbol");
  }
  Vector v = j.probs().row(row_symbol).transpose() / mass;
  return Pmf(j.col_alphabet(), std::move(v));
}

JointPmf product(const Pmf& p, const Pmf& q) {
  Matrix m = p.probs() * q.probs().transpose();
  return JointPmf(p.alphabet(), q.alphabet(), std::move(m));
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("binary_entropy: p outside [0,1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

}  // namespace noisyht
