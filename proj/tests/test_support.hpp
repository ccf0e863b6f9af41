#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "isinglearn/core.hpp"

namespace isinglearn::testing {

inline CouplingMatrix random_coupling(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix j = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) j(i, k) = j(k, i) = normal(rng);
  return CouplingMatrix(std::move(j));
}

inline Vector random_field(int n, std::mt19937_64& rng, double scale = 0.3) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector h(n);
  for (int i = 0; i < n; ++i) h(i) = normal(rng);
  return h;
}

inline SampleBatch random_batch(int l, int n, std::mt19937_64& rng) {
  SampleBatch::Spins s(l, n);
  for (int k = 0; k < l; ++k)
    for (int i = 0; i < n; ++i) s(k, i) = (rng() & 1U) ? 1 : -1;
  return SampleBatch(std::move(s));
}

/// Random coupling rescaled so that lambda_max - lambda_min == spread.
inline CouplingMatrix spectral_coupling(int n, double spread, std::mt19937_64& rng) {
  CouplingMatrix raw = random_coupling(n, rng);
  const Vector eig = symmetric_eigenvalues(raw.matrix());
  return CouplingMatrix((spread / (eig(n - 1) - eig(0))) * raw.matrix());
}

/// Random coupling rescaled so that the max row l1 norm equals `width`.
inline CouplingMatrix width_coupling(int n, double width, std::mt19937_64& rng) {
  CouplingMatrix raw = random_coupling(n, rng);
  return CouplingMatrix((width / raw.matrix().cwiseAbs().rowwise().sum().maxCoeff()) * raw.matrix());
}

/// Unnormalized log-weights by direct summation over all 2^n states; shares
/// no code with the library's enumerator.
inline std::vector<double> brute_force_probs(const IsingModel& m) {
  const int n = m.size();
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> w(states);
  double top = -1e300;
  for (std::size_t s = 0; s < states; ++s) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = ((s >> i) & 1U) ? 1.0 : -1.0;
      e += m.field(i) * xi;
      for (int k = 0; k < n; ++k) e += 0.5 * m.coupling(i, k) * xi * (((s >> k) & 1U) ? 1.0 : -1.0);
    }
    w[s] = e;
    top = std::max(top, e);
  }
  double total = 0.0;
  for (double& v : w) total += (v = std::exp(v - top));
  for (double& v : w) v /= total;
  return w;
}

/// Empirical state frequencies of a batch.
inline std::vector<double> empirical_table(const SampleBatch& batch) {
  const int n = batch.dimension();
  std::vector<double> freq(std::size_t{1} << n, 0.0);
  for (int k = 0; k < batch.count(); ++k) {
    std::size_t s = 0;
    for (int i = 0; i < n; ++i)
      if (batch.spins()(k, i) > 0) s |= std::size_t{1} << i;
    freq[s] += 1.0;
  }
  for (double& v : freq) v /= batch.count();
  return freq;
}

inline double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) acc += std::abs(p[s] - q[s]);
  return 0.5 * acc;
}

}  // namespace isinglearn::testing
