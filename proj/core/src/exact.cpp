#include "isinglearn/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "isinglearn/errors.hpp"
#include "isinglearn/rng.hpp"

namespace isinglearn {
namespace {

double log_weight(const IsingModel& m, const Vector& x) {
  return 0.5 * x.dot(m.coupling.matrix() * x) + m.field.dot(x);
}

std::vector<double> log_weights(const IsingModel& m) {
  const int n = m.size();
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<double> out(states);
  for (std::uint64_t s = 0; s < states; ++s) out[s] = log_weight(m, spins_from_index(s, n));
  return out;
}

// log(1 + exp(-2|f|)) computed without overflow; log P[x_i = sign] follows.
double log_prob_spin(double field, double spin) {
  const double u = 2.0 * field * spin;
  // log sigmoid(u)
  return u >= 0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u));
}

void check_same_dimension(const DistributionTable& p, const DistributionTable& q) {
  if (p.n != q.n || p.probs.size() != q.probs.size())
    throw ParameterError("distribution tables have different dimensions");
}

}  // namespace

void check_enumeration_cap(int n, int cap) {
  if (n > cap)
    throw CapabilityError("n=" + std::to_string(n) + " exceeds the enumeration cap of " + std::to_string(cap));
}

double log_partition_function(const IsingModel& m, int cap) {
  const int n = m.size();
  check_enumeration_cap(n, cap);
  const std::uint64_t states = std::uint64_t{1} << n;
  double running_max = -std::numeric_limits<double>::infinity();
  double scaled_sum = 0.0;  // sum exp(w - running_max)
  for (std::uint64_t s = 0; s < states; ++s) {
    const double w = log_weight(m, spins_from_index(s, n));
    if (w <= running_max) {
      scaled_sum += std::exp(w - running_max);
    } else {
      scaled_sum = scaled_sum * std::exp(running_max - w) + 1.0;
      running_max = w;
    }
  }
  return running_max + std::log(scaled_sum);
}

DistributionTable distribution(const IsingModel& m, int cap) {
  check_enumeration_cap(m.size(), cap);
  std::vector<double> w = log_weights(m);
  const double top = *std::max_element(w.begin(), w.end());
  double total = 0.0;
  for (double& v : w) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : w) v /= total;
  return DistributionTable{m.size(), std::move(w)};
}

double tv_distance(const DistributionTable& p, const DistributionTable& q) {
  check_same_dimension(p, q);
  double acc = 0.0;
  for (std::size_t s = 0; s < p.probs.size(); ++s) acc += std::abs(p.probs[s] - q.probs[s]);
  return std::min(1.0, 0.5 * acc);
}

double kl_divergence(const DistributionTable& p, const DistributionTable& q) {
  check_same_dimension(p, q);
  double acc = 0.0;
  for (std::size_t s = 0; s < p.probs.size(); ++s) {
    if (p.probs[s] == 0.0) continue;
    if (q.probs[s] == 0.0) throw ParameterError("KL divergence undefined: q(x) = 0 < p(x) at state " + std::to_string(s));
    acc += p.probs[s] * std::log(p.probs[s] / q.probs[s]);
  }
  return std::max(0.0, acc);
}

Moments moments(const DistributionTable& table, const CouplingMatrix& a) {
  const int n = table.n;
  if (a.size() != n) throw ParameterError("moment matrix dimension does not match distribution");
  Moments out;
  out.mean = Vector::Zero(n);
  double quad_sq = 0.0;
  for (std::size_t s = 0; s < table.probs.size(); ++s) {
    const double p = table.probs[s];
    const Vector x = spins_from_index(s, n);
    const Vector ax = a.matrix() * x;
    const double quad = x.dot(ax);
    out.mean += p * ax;
    out.second += p * ax.squaredNorm();
    out.quad_mean += p * quad;
    quad_sq += p * quad * quad;
  }
  out.quad_var = std::max(0.0, quad_sq - out.quad_mean * out.quad_mean);
  return out;
}

Moments moments(const IsingModel& m, const CouplingMatrix& a, int cap) {
  return moments(distribution(m, cap), a);
}

double poincare_constant(const IsingModel& m, int cap) {
  const int n = m.size();
  check_enumeration_cap(n, cap);
  const DistributionTable pi = distribution(m, cap);
  const std::uint64_t states = pi.probs.size();
  // I - D^{1/2} P D^{-1/2}; off-diagonal entries are symmetric in (x, y).
  Matrix laplacian = Matrix::Zero(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
  for (std::uint64_t s = 0; s < states; ++s) {
    const double px = pi.probs[s];
    for (int i = 0; i < n; ++i) {
      const std::uint64_t t = s ^ (std::uint64_t{1} << i);
      const double py = pi.probs[t];
      const double denom = px + py;
      if (denom == 0.0) continue;
      laplacian(s, s) += py / denom / n;
      laplacian(s, t) = -std::sqrt(px * py) / denom / n;
    }
  }
  if (states < 2) return 0.0;
  const Vector eig = symmetric_eigenvalues(laplacian);
  return 1.0 / (n * eig(1));
}

double default_hs_shift(const CouplingMatrix& j) {
  if (j.size() == 0) return 0.5;
  return std::abs(symmetric_eigenvalues(j.matrix())(0)) + 0.5;
}

std::vector<double> product_measure_log_probs(const Vector& field) {
  const int n = static_cast<int>(field.size());
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<double> out(states, 0.0);
  for (int i = 0; i < n; ++i) {
    const double lp = log_prob_spin(field(i), 1.0);
    const double lm = log_prob_spin(field(i), -1.0);
    for (std::uint64_t s = 0; s < states; ++s) out[s] += ((s >> i) & 1U) ? lp : lm;
  }
  return out;
}

HubbardStratonovichResult hubbard_stratonovich_check(const IsingModel& m, std::optional<double> shift, int draws,
                                                     std::uint64_t seed, int bayes_points, int cap) {
  const int n = m.size();
  check_enumeration_cap(n, cap);
  if (draws < 1) throw ParameterError("draws must be >= 1");
  HubbardStratonovichResult result;
  result.shift = shift.value_or(default_hs_shift(m.coupling));

  const Matrix k = m.coupling.matrix() + result.shift * Matrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
  if (n > 0 && !(eig.eigenvalues()(0) > 0.0))
    throw ParameterError("J + shift*I is not positive definite (lambda_min = " +
                         std::to_string(eig.eigenvalues()(0)) + ")");
  const Matrix k_inv_sqrt =
      eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

  const DistributionTable exact = distribution(m, cap);
  const std::uint64_t states = exact.probs.size();
  std::vector<double> cdf(states);
  double acc = 0.0;
  for (std::uint64_t s = 0; s < states; ++s) cdf[s] = (acc += exact.probs[s]);

  CounterRng rng(derive_stream(seed, "hubbard_stratonovich"));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> mixture(states, 0.0);
  std::vector<Vector> probe_ys;
  Vector g(n);
  for (int d = 0; d < draws; ++d) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const Vector x = spins_from_index(static_cast<std::uint64_t>(it - cdf.begin()), n);
    for (int i = 0; i < n; ++i) g(i) = normal(rng);
    const Vector y = x + k_inv_sqrt * g;
    if (static_cast<int>(probe_ys.size()) < bayes_points) probe_ys.push_back(y);
    const std::vector<double> lp = product_measure_log_probs(k * y + m.field);
    for (std::uint64_t s = 0; s < states; ++s) mixture[s] += std::exp(lp[s]);
  }
  for (double& v : mixture) v /= draws;
  result.mixture = DistributionTable{n, std::move(mixture)};
  result.tv_error = tv_distance(result.mixture, exact);

  // P[X = x | Y = y] proportional to pi(x) exp(-(y - x)^T K (y - x) / 2).
  for (const Vector& y : probe_ys) {
    std::vector<double> post(states);
    double top = -std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < states; ++s) {
      const Vector diff = y - spins_from_index(s, n);
      post[s] = std::log(exact.probs[s]) - 0.5 * diff.dot(k * diff);
      top = std::max(top, post[s]);
    }
    double total = 0.0;
    for (double& v : post) total += (v = std::exp(v - top));
    const std::vector<double> lp = product_measure_log_probs(k * y + m.field);
    for (std::uint64_t s = 0; s < states; ++s)
      result.bayes_error = std::max(result.bayes_error, std::abs(post[s] / total - std::exp(lp[s])));
  }
  return result;
}

}  // namespace isinglearn
