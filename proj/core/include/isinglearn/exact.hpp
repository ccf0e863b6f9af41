#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isinglearn/core.hpp"

namespace isinglearn {

inline constexpr int kTableCap = 20;
inline constexpr int kPoincareCap = 8;

/// Probabilities of all 2^n states. State s encodes x_i = +1 iff bit i of s
/// is set (see spins_from_index).
struct DistributionTable {
  int n = 0;
  std::vector<double> probs;
};

/// log Z for the model, via streaming log-sum-exp over all states.
double log_partition_function(const IsingModel& m, int cap = kTableCap);

DistributionTable distribution(const IsingModel& m, int cap = kTableCap);

/// 1/2 sum |p - q|.
double tv_distance(const DistributionTable& p, const DistributionTable& q);

/// sum p log(p / q) with 0 log 0 = 0. Throws ParameterError when q(x) = 0 < p(x).
double kl_divergence(const DistributionTable& p, const DistributionTable& q);

struct Moments {
  Vector mean;            // E[A X]
  double second = 0.0;    // E[|A X|^2]
  double quad_mean = 0.0; // E[X^T A X]
  double quad_var = 0.0;  // Var(X^T A X)
};

Moments moments(const IsingModel& m, const CouplingMatrix& a, int cap = kTableCap);
Moments moments(const DistributionTable& table, const CouplingMatrix& a);

/// Smallest rho with Var(f) <= rho * n * E(f, f) for the uniform-site heat
/// bath chain; equals 1 / (n * spectral gap).
double poincare_constant(const IsingModel& m, int cap = kPoincareCap);

struct HubbardStratonovichResult {
  double shift = 0.0;
  double tv_error = 0.0;     // TV(Monte Carlo mixture, exact table)
  double bayes_error = 0.0;  // max |P[X | Y=y] - product measure| over checked y
  DistributionTable mixture;
};

/// |lambda_min(J)| + 0.5
double default_hs_shift(const CouplingMatrix& j);

/// Draws Y = X + K^{-1/2} G with K = J + shift I, averages the product
/// measures with field K Y + h and compares against the exact table. The
/// Bayes check conditions the exact joint law on `bayes_points` of the drawn
/// y values. Throws ParameterError when K is not positive definite.
HubbardStratonovichResult hubbard_stratonovich_check(const IsingModel& m, std::optional<double> shift, int draws,
                                                     std::uint64_t seed, int bayes_points = 16,
                                                     int cap = kTableCap);

/// Per-state log of the product measure with field f.
std::vector<double> product_measure_log_probs(const Vector& field);

void check_enumeration_cap(int n, int cap);

}  // namespace isinglearn
