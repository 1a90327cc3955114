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

#ifndef NOISYHT_PROBCORE_HPP
#define NOISYHT_PROBCORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace noisyht {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance on probability mass sums.
inline constexpr double kMassTol = 1e-9;

/// Thrown when an operation refuses an input because it exceeds a size cap
/// (as opposed to the input being malformed).
class SizeCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite symbol set. Labels are optional display strings; when present
/// there is exactly one per symbol and they are unique.
struct Alphabet {
  int size = 0;
  std::vector<std::string> labels;

  Alphabet() = default;
  explicit Alphabet(int n);
  Alphabet(int n, std::vector<std::string> names);

  std::string label(int symbol) const;
  bool operator==(const Alphabet& other) const {
    return size == other.size && labels == other.labels;
  }
};

/// Probability mass function over one alphabet. Entries are non-negative
/// and sum to one within kMassTol. Zero-probability symbols are kept.
class Pmf {
 public:
  Pmf(Alphabet alphabet, Vector probs);

  const Alphabet& alphabet() const { return alphabet_; }
  const Vector& probs() const { return probs_; }
  int size() const { return alphabet_.size; }
  double operator()(int symbol) const { return probs_(symbol); }

  /// Explicitly rescale to unit mass. Validation never renormalizes.
  Pmf normalized() const;

  static Pmf uniform(Alphabet alphabet);
  static Pmf point_mass(Alphabet alphabet, int symbol);

 private:
  Alphabet alphabet_;
  Vector probs_;
};

/// Joint pmf over a pair of alphabets; probs(u, v) is row-major in u.
class JointPmf {
 public:
  JointPmf(Alphabet row, Alphabet col, Matrix probs);

  const Alphabet& row_alphabet() const { return row_; }
  const Alphabet& col_alphabet() const { return col_; }
  const Matrix& probs() const { return probs_; }
  int rows() const { return row_.size; }
  int cols() const { return col_.size; }
  double operator()(int u, int v) const { return probs_(u, v); }

  JointPmf transposed() const;

 private:
  Alphabet row_, col_;
  Matrix probs_;
};

/// Conditional law: one pmf over the output alphabet per input symbol,
/// stored as a row-stochastic matrix.
class CondPmf {
 public:
  CondPmf(Alphabet input, Alphabet output, Matrix rows);

  const Alphabet& input_alphabet() const { return input_; }
  const Alphabet& output_alphabet() const { return output_; }
  const Matrix& rows() const { return rows_; }
  double operator()(int in, int out) const { return rows_(in, out); }

  Pmf row(int in) const;
  /// True when every row is a point mass.
  bool deterministic() const;

  static CondPmf identity(Alphabet a);
  /// All inputs map to the same output symbol.
  static CondPmf constant(Alphabet input, Alphabet output, int symbol);

 private:
  Alphabet input_, output_;
  Matrix rows_;
};

/// Joint pmf over a triple of alphabets, stored flat with c fastest.
class Joint3Pmf {
 public:
  Joint3Pmf(Alphabet a, Alphabet b, Alphabet c, std::vector<double> probs);

  const Alphabet& alphabet(int axis) const;
  double operator()(int a, int b, int c) const {
    return probs_[(static_cast<std::size_t>(a) * b_.size + b) * c_.size + c];
  }
  const std::vector<double>& flat() const { return probs_; }

  Pmf marginal(int axis) const;
  /// Pair marginal in the given axis order.
  JointPmf pair_marginal(int axis1, int axis2) const;
  /// Joint over ((axis1, axis2) grouped as one symbol, remaining axis).
  JointPmf grouped_vs(int axis1, int axis2) const;

 private:
  Alphabet a_, b_, c_;
  std::vector<double> probs_;
};

// --- Information measures. All in nats; 0 ln 0 := 0 throughout. ---

double entropy(const Pmf& p);
double mutual_information(const JointPmf& j);

/// +infinity when support(p) is not contained in support(q).
double kl_divergence(const Pmf& p, const Pmf& q);
double kl_divergence(const JointPmf& p, const JointPmf& q);

double total_variation(const Pmf& p, const Pmf& q);
double total_variation(const JointPmf& p, const JointPmf& q);

/// I(A;B|C) where C is the axis named by cond_axis and (A,B) are the other
/// two axes in order.
double conditional_mutual_information(const Joint3Pmf& j, int cond_axis);

// --- Structure operations ---

/// p(u,v,w) = source(u,v) * aux(w|u); the chain V-U-W holds by construction.
Joint3Pmf compose(const JointPmf& source, const CondPmf& aux);

std::pair<Pmf, Pmf> marginals(const JointPmf& j);
/// Column law given row symbol u. Errors when the row has zero mass.
Pmf condition(const JointPmf& j, int row_symbol);
JointPmf product(const Pmf& p, const Pmf& q);

/// Binary entropy in nats; domain [0,1].
double binary_entropy(double p);

}  // namespace noisyht

#endif  // NOISYHT_PROBCORE_HPP
