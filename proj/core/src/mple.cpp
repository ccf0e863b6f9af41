#include "isinglearn/mple.hpp"

#include <cmath>
#include <numbers>

#include "isinglearn/errors.hpp"

namespace isinglearn {

double logcosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

PseudolikelihoodContext::PseudolikelihoodContext(const SampleBatch& samples, Vector field)
    : spins_(samples.as_real()), field_(std::move(field)) {
  if (field_.size() != spins_.cols())
    throw ParameterError("field length " + std::to_string(field_.size()) + " does not match sample dimension " +
                         std::to_string(spins_.cols()));
}

void PseudolikelihoodContext::check_dimension(const CouplingMatrix& j) const {
  if (j.size() != dimension())
    throw ParameterError("coupling dimension " + std::to_string(j.size()) + " does not match sample dimension " +
                         std::to_string(dimension()));
}

const Matrix& PseudolikelihoodContext::local_fields(const CouplingMatrix& j) const {
  check_dimension(j);
  if (!cache_valid_ || !(cached_j_ == j)) {
    local_.noalias() = spins_ * j.matrix();
    local_.rowwise() += field_.transpose();
    cached_j_ = j;
    cache_valid_ = true;
  }
  return local_;
}

bool PseudolikelihoodContext::workspace_consistent() const {
  if (!cache_valid_) return true;
  Matrix fresh = spins_ * cached_j_.matrix();
  fresh.rowwise() += field_.transpose();
  return fresh == local_;
}

double PseudolikelihoodContext::objective(const CouplingMatrix& j) const {
  const Matrix& u = local_fields(j);
  // logcosh(u) - x u + log 2, summed row by row so the order is fixed.
  double total = 0.0;
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    double row = 0.0;
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      const double a = std::abs(u(k, i));
      row += a + std::log1p(std::exp(-2.0 * a)) - spins_(k, i) * u(k, i);
    }
    total += row;
  }
  return total;
}

CouplingMatrix PseudolikelihoodContext::gradient(const CouplingMatrix& j) const {
  const Matrix& u = local_fields(j);
  const Matrix residual = u.array().tanh().matrix() - spins_;
  const Matrix half = residual.transpose() * spins_;
  Matrix g = half + half.transpose();
  g.diagonal().setZero();
  return CouplingMatrix::unchecked(std::move(g));
}

PseudolikelihoodContext::ObjectiveAndGradient PseudolikelihoodContext::evaluate(const CouplingMatrix& j) const {
  return {objective(j), gradient(j)};
}

PseudolikelihoodContext::Directional PseudolikelihoodContext::directional_derivatives(const CouplingMatrix& j,
                                                                                       const CouplingMatrix& a) const {
  check_dimension(a);
  const Matrix& u = local_fields(j);
  const Matrix ax = spins_ * a.matrix();  // row k holds (A X_k)^T
  double first = 0.0;
  double second = 0.0;
  for (Eigen::Index k = 0; k < u.rows(); ++k)
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      const double t = std::tanh(u(k, i));
      const double e = std::exp(-2.0 * std::abs(u(k, i)));
      const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
      first += ax(k, i) * (t - spins_(k, i));
      second += ax(k, i) * ax(k, i) * sech2;
    }
  return {0.5 * first, 0.5 * second};
}

}  // namespace isinglearn
