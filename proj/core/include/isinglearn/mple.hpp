#pragma once

#include "isinglearn/core.hpp"

namespace isinglearn {

/// Negative log-pseudolikelihood of a sample batch with a known field h:
///
///   phi(J) = sum_k sum_i [ logcosh(u_ki) - x_ki u_ki + log 2 ],  u_ki = J_i x_k + h_i.
///
/// The free parameters are the strict upper triangle of J, so `gradient`
/// returns the total derivative with respect to each symmetric pair J_ij.
/// `directional_derivatives` uses the half-weighted convention: along the
/// line t -> J + tA the derivatives of phi are exactly 2 * first and
/// 2 * second.
///
/// Local fields X J + h are cached for the last evaluated J; the context is
/// therefore not safe for concurrent use.
class PseudolikelihoodContext {
 public:
  PseudolikelihoodContext(const SampleBatch& samples, Vector field);

  int dimension() const { return static_cast<int>(spins_.cols()); }
  int count() const { return static_cast<int>(spins_.rows()); }
  const Vector& field() const { return field_; }

  double objective(const CouplingMatrix& j) const;
  CouplingMatrix gradient(const CouplingMatrix& j) const;

  struct ObjectiveAndGradient {
    double value;
    CouplingMatrix gradient;
  };
  ObjectiveAndGradient evaluate(const CouplingMatrix& j) const;

  struct Directional {
    double first;
    double second;
  };
  Directional directional_derivatives(const CouplingMatrix& j, const CouplingMatrix& a) const;

  /// True iff the cached local fields equal a fresh recomputation.
  bool workspace_consistent() const;

 private:
  const Matrix& local_fields(const CouplingMatrix& j) const;
  void check_dimension(const CouplingMatrix& j) const;

  Matrix spins_;  // l x n
  Vector field_;
  mutable CouplingMatrix cached_j_;
  mutable Matrix local_;  // l x n, spins_ * J + 1 h^T
  mutable bool cache_valid_ = false;
};

/// logcosh(u) = |u| + log1p(exp(-2|u|)) - log 2
double logcosh(double u);

}  // namespace isinglearn
