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

#include "noisyht/exponent.hpp"

#include "noisyht/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>

namespace noisyht {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kLogFloor = 1e-300;

double safe_log(double x) { return std::log(std::max(x, kLogFloor)); }

// Shared per-source data for the theta_mu objective.
struct LagrangianProblem {
  Matrix source;  // |U| x |V|
  Vector p_u, p_v;
  double capacity = 0.0;
  double mu = 0.0;
  int nu = 0, nv = 0, nw = 0;

  LagrangianProblem(const JointPmf& src, double cap, double mu_in)
      : source(src.probs()), capacity(cap), mu(mu_in), nu(src.rows()),
        nv(src.cols()), nw(src.rows() + 1) {
    p_u = source.rowwise().sum();
    p_v = source.colwise().sum().transpose();
  }

  // I(V;W) + mu (C - I(U;W)) on compose(source, q).
  double eval(const Matrix& q) const {
    const Vector p_w = q.transpose() * p_u;
    const Matrix j_vw = source.transpose() * q;
    double i_uw = 0.0;
    for (int u = 0; u < nu; ++u) {
      if (p_u(u) <= 0.0) continue;
      for (int w = 0; w < nw; ++w) {
        const double val = q(u, w);
        if (val > 0.0 && p_w(w) > 0.0) {
          i_uw += p_u(u) * val * std::log(val / p_w(w));
        }
      }
    }
    double i_vw = 0.0;
    for (int v = 0; v < nv; ++v) {
      for (int w = 0; w < nw; ++w) {
        const double j = j_vw(v, w);
        if (j > 0.0) i_vw += j * std::log(j / (p_v(v) * p_w(w)));
      }
    }
    return i_vw + mu * (capacity - i_uw);
  }

  // d/dq(row u) of the objective, scaled by 1/p_u(u); shift-invariant
  // pieces dropped (the exponentiated step renormalizes anyway).
  Vector row_gradient(const Matrix& q, int u) const {
    const Vector p_w = q.transpose() * p_u;
    const Matrix j_vw = source.transpose() * q;
    Vector g = Vector::Zero(nw);
    for (int w = 0; w < nw; ++w) {
      double s = 0.0;
      for (int v = 0; v < nv; ++v) {
        if (source(u, v) > 0.0) {
          s += source(u, v) / p_u(u) * safe_log(j_vw(v, w));
        }
      }
      g(w) = s - (1.0 - mu) * safe_log(p_w(w)) - mu * safe_log(q(u, w));
    }
    return g;
  }

  // Row-wise exponentiated-gradient ascent with backtracking, then a
  // fixed-point polish accepted only when it improves the objective.
  double ascend(Matrix& q) const {
    double f = eval(q);
    double eta = 0.5;
    const int max_sweeps = 400;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      const double f_before = f;
      for (int u = 0; u < nu; ++u) {
        if (p_u(u) <= 0.0) continue;
        const Vector g = row_gradient(q, u);
        double step = eta;
        for (int tries = 0; tries < 30; ++tries) {
          Vector logs = q.row(u).transpose().array().max(kLogFloor).log() +
                        step * g.array();
          logs.array() -= logs.maxCoeff();
          Vector cand = logs.array().exp();
          cand /= cand.sum();
          Matrix trial = q;
          trial.row(u) = cand.transpose();
          const double f_trial = eval(trial);
          if (f_trial > f) {
            q = std::move(trial);
            f = f_trial;
            eta = std::min(step * 1.5, 64.0);
            break;
          }
          step *= 0.5;
        }
      }
      if (f - f_before <= 1e-14 * (1.0 + std::abs(f))) break;
    }
    polish(q, f);
    return f;
  }

  // Stationarity map q(w|u) proportional to p_w(w) exp((1/mu) sum_v
  // P(v|u) ln p(v|w)); kept only while it improves.
  void polish(Matrix& q, double& f) const {
    Matrix best = q;
    for (int iter = 0; iter < 200; ++iter) {
      const Vector p_w = q.transpose() * p_u;
      const Matrix j_vw = source.transpose() * q;
      Matrix next(nu, nw);
      for (int u = 0; u < nu; ++u) {
        if (p_u(u) <= 0.0) {
          next.row(u) = q.row(u);
          continue;
        }
        Vector logs(nw);
        for (int w = 0; w < nw; ++w) {
          double s = 0.0;
          for (int v = 0; v < nv; ++v) {
            if (source(u, v) > 0.0 && p_w(w) > 0.0) {
              s += source(u, v) / p_u(u) * safe_log(j_vw(v, w) / p_w(w));
            }
          }
          logs(w) = safe_log(p_w(w)) + s / mu;
        }
        logs.array() -= logs.maxCoeff();
        Vector row = logs.array().exp();
        next.row(u) = (row / row.sum()).transpose();
      }
      const double f_next = eval(next);
      if (f_next <= f + 1e-15) break;
      f = f_next;
      best = next;
      q = std::move(next);
    }
    q = std::move(best);
  }
};

Matrix smoothed(const Matrix& q, double weight) {
  const double u = weight / q.cols();
  return q * (1.0 - weight) + Matrix::Constant(q.rows(), q.cols(), u);
}

}  // namespace

AuxChannel::AuxChannel(CondPmf c) : cond(std::move(c)) {
  if (cond.output_alphabet().size > cond.input_alphabet().size + 1) {
    throw std::invalid_argument("AuxChannel: |W| above |U|+1");
  }
}

AuxChannel AuxChannel::identity_padded(const Alphabet& u) {
  Matrix m = Matrix::Zero(u.size, u.size + 1);
  for (int i = 0; i < u.size; ++i) m(i, i) = 1.0;
  return AuxChannel(CondPmf(u, Alphabet(u.size + 1), std::move(m)));
}

AuxChannel AuxChannel::constant(const Alphabet& u) {
  Matrix m = Matrix::Zero(u.size, u.size + 1);
  m.col(0).setOnes();
  return AuxChannel(CondPmf(u, Alphabet(u.size + 1), std::move(m)));
}

ThetaMuResult theta_mu(const JointPmf& source, double dmc_capacity, double mu,
                       int restarts, std::uint64_t seed) {
  if (mu <= 0.0) throw std::invalid_argument("theta_mu: mu must be > 0");
  if (dmc_capacity < 0.0) {
    throw std::invalid_argument("theta_mu: capacity must be >= 0");
  }
  if (restarts < 1) throw std::invalid_argument("theta_mu: restarts < 1");

  const LagrangianProblem prob(source, dmc_capacity, mu);
  const Alphabet& u_alpha = source.row_alphabet();

  const Matrix q_identity = AuxChannel::identity_padded(u_alpha).cond.rows();
  const Matrix q_constant = AuxChannel::constant(u_alpha).cond.rows();

  // Candidate list in fixed order; ties within 1e-12 keep the earliest.
  std::vector<Matrix> starts;
  starts.push_back(q_identity);            // evaluated as-is, no ascent
  starts.push_back(q_constant);            // evaluated as-is, no ascent
  starts.push_back(smoothed(q_identity, 0.02));
  starts.push_back(smoothed(q_constant, 0.02));
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    Matrix q(prob.nu, prob.nw);
    for (int u = 0; u < prob.nu; ++u) {
      q.row(u) = rng.simplex_point(prob.nw).transpose();
    }
    starts.push_back(std::move(q));
  }

  double best_value = -std::numeric_limits<double>::infinity();
  Matrix best_q = q_constant;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Matrix q = starts[i];
    const double value = i < 2 ? prob.eval(q) : prob.ascend(q);
    if (value > best_value + kTieTol) {
      best_value = value;
      best_q = std::move(q);
    }
  }
  return {best_value,
          AuxChannel(CondPmf(u_alpha, Alphabet(prob.nw), std::move(best_q)))};
}

std::vector<double> log_spaced_grid(double lo, double hi, int count) {
  if (lo <= 0.0 || hi < lo || count < 1) {
    throw std::invalid_argument("log_spaced_grid: bad range");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    grid[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  }
  return grid;
}

std::vector<double> default_mu_grid() { return log_spaced_grid(1e-2, 1e2, 40); }

ExponentResult theta(const JointPmf& source, double dmc_capacity,
                     const std::vector<double>& mu_grid, int restarts,
                     std::uint64_t seed) {
  if (mu_grid.empty()) throw std::invalid_argument("theta: empty mu grid");
  for (double mu : mu_grid) {
    if (mu <= 0.0) throw std::invalid_argument("theta: mu grid entry <= 0");
  }
  double grid_min = std::numeric_limits<double>::infinity();
  double best_mu = mu_grid.front();
  std::optional<AuxChannel> best_aux;
  std::vector<std::pair<double, double>> trace;
  for (double mu : mu_grid) {
    ThetaMuResult r = theta_mu(source, dmc_capacity, mu, restarts, seed);
    trace.emplace_back(mu, r.value);
    if (r.value < grid_min) {
      grid_min = r.value;
      best_mu = mu;
      best_aux = std::move(r.argmax);
    }
  }
  // The grid cannot reach the mu -> 0 / mu -> infinity hyperplanes; close
  // it with the data-processing ceilings, which are also upper bounds.
  const double i_uv = mutual_information(source);
  const double value = std::max(0.0, std::min({grid_min, i_uv, dmc_capacity}));
  return ExponentResult{value, best_mu, std::move(*best_aux), std::move(trace),
                        ExponentResult::Method::kLagrangian};
}

namespace {

void simplex_rows(int k, int parts, std::vector<double>& scratch,
                  std::vector<Vector>& out) {
  if (parts == 1) {
    scratch.push_back(static_cast<double>(k));
    Vector row(scratch.size());
    for (std::size_t i = 0; i < scratch.size(); ++i) row(i) = scratch[i];
    out.push_back(row);
    scratch.pop_back();
    return;
  }
  for (int c = 0; c <= k; ++c) {
    scratch.push_back(static_cast<double>(c));
    simplex_rows(k - c, parts - 1, scratch, out);
    scratch.pop_back();
  }
}

struct DirectScan {
  const Matrix& source;
  const Vector& p_u;
  double h_v;  // H(V), fixed
  double capacity;
  const std::vector<Vector>& rows;
  const std::vector<double>& row_entropy;
  int nu, nv, nw;
  double best = 0.0;

  void run(int depth, const Vector& p_w, const Matrix& j_vw, double h_w_given_u) {
    if (depth == nu) {
      double h_w = 0.0;
      for (int w = 0; w < nw; ++w) {
        if (p_w(w) > 0.0) h_w -= p_w(w) * std::log(p_w(w));
      }
      const double i_uw = h_w - h_w_given_u;
      if (i_uw > capacity + 1e-12) return;
      double h_vw = 0.0;
      for (int v = 0; v < nv; ++v) {
        for (int w = 0; w < nw; ++w) {
          const double j = j_vw(v, w);
          if (j > 0.0) h_vw -= j * std::log(j);
        }
      }
      best = std::max(best, h_v + h_w - h_vw);
      return;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Vector& r = rows[i];
      run(depth + 1, p_w + p_u(depth) * r,
          j_vw + source.row(depth).transpose() * r.transpose(),
          h_w_given_u + p_u(depth) * row_entropy[i]);
    }
  }
};

}  // namespace

double theta_direct(const JointPmf& source, double dmc_capacity,
                    double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw std::invalid_argument("theta_direct: grid step outside (0, 0.5]");
  }
  if (dmc_capacity < 0.0) {
    throw std::invalid_argument("theta_direct: capacity must be >= 0");
  }
  const int nu = source.rows();
  const int nw = nu + 1;
  const int k = std::max(1, static_cast<int>(std::lround(1.0 / grid_step)));

  std::vector<Vector> rows;
  std::vector<double> scratch;
  simplex_rows(k, nw, scratch, rows);
  for (auto& r : rows) r /= static_cast<double>(k);

  double projected = 1.0;
  for (int u = 0; u < nu; ++u) {
    projected *= static_cast<double>(rows.size());
    if (projected > 1e8) {
      throw SizeCapError("theta_direct: projected grid above 1e8 candidates");
    }
  }

  std::vector<double> row_entropy(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double h = 0.0;
    for (int w = 0; w < nw; ++w) {
      if (rows[i](w) > 0.0) h -= rows[i](w) * std::log(rows[i](w));
    }
    row_entropy[i] = h;
  }

  const Vector p_u = source.probs().rowwise().sum();
  const Vector p_v = source.probs().colwise().sum().transpose();
  double h_v = 0.0;
  for (int v = 0; v < source.cols(); ++v) {
    if (p_v(v) > 0.0) h_v -= p_v(v) * std::log(p_v(v));
  }

  DirectScan scan{source.probs(), p_u,          h_v,
                  dmc_capacity,   rows,         row_entropy,
                  nu,             source.cols(), nw};
  scan.run(0, Vector::Zero(nw), Matrix::Zero(source.cols(), nw), 0.0);
  return scan.best;
}

TradeoffRegion region(const JointPmf& source,
                      const std::vector<double>& capacity_grid,
                      const std::vector<double>& mu_grid, int restarts,
                      std::uint64_t seed) {
  if (capacity_grid.empty()) throw std::invalid_argument("region: empty grid");
  for (std::size_t i = 0; i < capacity_grid.size(); ++i) {
    if (capacity_grid[i] < 0.0 ||
        (i > 0 && capacity_grid[i] < capacity_grid[i - 1])) {
      throw std::invalid_argument("region: grid must be sorted and >= 0");
    }
  }
  TradeoffRegion out;
  double running = 0.0;
  for (double cap : capacity_grid) {
    ExponentResult r = theta(source, cap, mu_grid, restarts, seed);
    double value = r.theta;
    if (value < running) {
      const double fix = running - value;
      out.max_monotonicity_fix = std::max(out.max_monotonicity_fix, fix);
      if (fix > 1e-3) {
        std::fprintf(stderr,
                     "region: non-monotone solver output at C=%.6g "
                     "(corrected by %.3g)\n",
                     cap, fix);
      }
      value = running;
    }
    running = value;
    out.points.push_back({cap, value, r.best_mu});
  }
  return out;
}

namespace {

// Euclidean projection onto the probability simplex restricted to `support`.
void project_simplex(std::vector<double>& q, const std::vector<int>& support) {
  std::vector<double> y;
  y.reserve(support.size());
  for (int idx : support) y.push_back(q[idx]);
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  int rho = 0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cum += sorted[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) {
      rho = static_cast<int>(j + 1);
      tau = t;
    }
  }
  (void)rho;
  for (std::size_t j = 0; j < support.size(); ++j) {
    q[support[j]] = std::max(0.0, y[j] - tau);
  }
}

struct RsProblem {
  Matrix p_uv;
  double capacity, mu, nu_coef;
  int nu, nv, nw;
  std::vector<int> support;  // flat (u,v,w) indices with p_uv(u,v) > 0

  std::size_t flat(int u, int v, int w) const {
    return (static_cast<std::size_t>(u) * nv + v) * nw + w;
  }

  double eval(const std::vector<double>& q) const {
    Vector qu = Vector::Zero(nu), qv = Vector::Zero(nv), qw = Vector::Zero(nw);
    Matrix qvw = Matrix::Zero(nv, nw), quw = Matrix::Zero(nu, nw);
    double h_uvw = 0.0, cross = 0.0;
    for (int u = 0; u < nu; ++u) {
      for (int v = 0; v < nv; ++v) {
        for (int w = 0; w < nw; ++w) {
          const double p = q[flat(u, v, w)];
          if (p <= 0.0) continue;
          qu(u) += p;
          qv(v) += p;
          qw(w) += p;
          qvw(v, w) += p;
          quw(u, w) += p;
          h_uvw -= p * std::log(p);
          cross += p * std::log(p_uv(u, v));  // support guarantees > 0
        }
      }
    }
    auto neg_sum_plogp = [](const double* d, int n) {
      double h = 0.0;
      for (int i = 0; i < n; ++i) {
        if (d[i] > 0.0) h -= d[i] * std::log(d[i]);
      }
      return h;
    };
    const double h_u = neg_sum_plogp(qu.data(), nu);
    const double h_v = neg_sum_plogp(qv.data(), nv);
    const double h_w = neg_sum_plogp(qw.data(), nw);
    const double h_vw = neg_sum_plogp(qvw.data(), nv * nw);
    const double h_uw = neg_sum_plogp(quw.data(), nu * nw);
    return h_v + (1.0 - mu) * h_w + nu_coef * h_u - h_vw - nu_coef * h_uw +
           (nu_coef + mu) * h_uvw + (nu_coef + mu) * cross + mu * capacity;
  }

  std::vector<double> gradient(const std::vector<double>& q) const {
    Vector qu = Vector::Zero(nu), qv = Vector::Zero(nv), qw = Vector::Zero(nw);
    Matrix qvw = Matrix::Zero(nv, nw), quw = Matrix::Zero(nu, nw);
    for (int u = 0; u < nu; ++u) {
      for (int v = 0; v < nv; ++v) {
        for (int w = 0; w < nw; ++w) {
          const double p = q[flat(u, v, w)];
          qu(u) += p;
          qv(v) += p;
          qw(w) += p;
          qvw(v, w) += p;
          quw(u, w) += p;
        }
      }
    }
    std::vector<double> g(q.size(), 0.0);
    const double floor = 1e-100;
    for (int u = 0; u < nu; ++u) {
      for (int v = 0; v < nv; ++v) {
        for (int w = 0; w < nw; ++w) {
          const std::size_t i = flat(u, v, w);
          if (p_uv(u, v) <= 0.0) continue;
          g[i] = -std::log(std::max(qv(v), floor)) -
                 (1.0 - mu) * std::log(std::max(qw(w), floor)) -
                 nu_coef * std::log(std::max(qu(u), floor)) +
                 std::log(std::max(qvw(v, w), floor)) +
                 nu_coef * std::log(std::max(quw(u, w), floor)) -
                 (nu_coef + mu) * std::log(std::max(q[i], floor)) +
                 (nu_coef + mu) * std::log(p_uv(u, v));
        }
      }
    }
    return g;
  }

  double ascend(std::vector<double>& q) const {
    double f = eval(q);
    double eta = 0.1;
    for (int iter = 0; iter < 5000; ++iter) {
      const std::vector<double> g = gradient(q);
      bool improved = false;
      double step = eta;
      for (int tries = 0; tries < 40; ++tries) {
        std::vector<double> trial = q;
        for (int idx : support) trial[idx] += step * g[idx];
        project_simplex(trial, support);
        const double f_trial = eval(trial);
        if (f_trial > f) {
          q = std::move(trial);
          const double gain = f_trial - f;
          f = f_trial;
          eta = std::min(step * 1.3, 1e3);
          improved = gain > 1e-13 * (1.0 + std::abs(f));
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    return f;
  }
};

}  // namespace

double r_s_mu_nu(const JointPmf& source, double dmc_capacity, double mu,
                 double nu, int restarts, std::uint64_t seed) {
  if (mu <= 0.0 || nu <= 0.0) {
    throw std::invalid_argument("r_s_mu_nu: mu and nu must be > 0");
  }
  if (restarts < 1) throw std::invalid_argument("r_s_mu_nu: restarts < 1");

  RsProblem prob{source.probs(), dmc_capacity,  mu,
                 nu,             source.rows(), source.cols(),
                 source.rows() + 1,             {}};
  for (int u = 0; u < prob.nu; ++u) {
    for (int v = 0; v < prob.nv; ++v) {
      if (prob.p_uv(u, v) > 0.0) {
        for (int w = 0; w < prob.nw; ++w) {
          prob.support.push_back(static_cast<int>(prob.flat(u, v, w)));
        }
      }
    }
  }

  const std::size_t dim =
      static_cast<std::size_t>(prob.nu) * prob.nv * prob.nw;

  // Candidate at P_UV x theta_mu argmax: equals theta_mu exactly, making
  // the returned value dominate the hyperplane family.
  const ThetaMuResult tm =
      theta_mu(source, dmc_capacity, mu, std::max(restarts, 16), seed);
  std::vector<std::vector<double>> starts;
  {
    std::vector<double> q0(dim, 0.0);
    for (int u = 0; u < prob.nu; ++u) {
      for (int v = 0; v < prob.nv; ++v) {
        for (int w = 0; w < prob.nw; ++w) {
          q0[prob.flat(u, v, w)] = source(u, v) * tm.argmax.cond(u, w);
        }
      }
    }
    starts.push_back(std::move(q0));
  }
  {
    std::vector<double> q1(dim, 0.0);  // P_UV x uniform W
    for (int u = 0; u < prob.nu; ++u) {
      for (int v = 0; v < prob.nv; ++v) {
        for (int w = 0; w < prob.nw; ++w) {
          q1[prob.flat(u, v, w)] = source(u, v) / prob.nw;
        }
      }
    }
    starts.push_back(std::move(q1));
  }
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, (1ull << 32) | static_cast<std::uint64_t>(r));
    std::vector<double> q(dim, 0.0);
    double total = 0.0;
    for (int idx : prob.support) {
      q[idx] = -std::log(1.0 - rng.next_double());
      total += q[idx];
    }
    for (int idx : prob.support) q[idx] /= total;
    starts.push_back(std::move(q));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    best = std::max(best, prob.eval(start));  // pure candidate value
    std::vector<double> q = start;
    best = std::max(best, prob.ascend(q));
  }
  return best;
}

}  // namespace noisyht
