#include "isinglearn/core.hpp"

#include <cmath>
#include <sstream>

#include "isinglearn/errors.hpp"

namespace isinglearn {
namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  return out;
}

}  // namespace

CouplingMatrix::CouplingMatrix(Matrix entries) : entries_(std::move(entries)) {
  auto errors = validate_coupling(entries_);
  if (!errors.empty()) throw ValidationError(join(errors));
}

CouplingMatrix CouplingMatrix::zero(int n) { return unchecked(Matrix::Zero(n, n)); }

CouplingMatrix CouplingMatrix::unchecked(Matrix entries) {
  CouplingMatrix out;
  out.entries_ = std::move(entries);
  return out;
}

CouplingMatrix CouplingMatrix::from_upper(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out(i, j) = out(j, i) = m(i, j);
  return unchecked(std::move(out));
}

CouplingMatrix CouplingMatrix::symmetrized(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) out(i, j) = out(j, i) = 0.5 * (m(i, j) + m(j, i));
  }
  return unchecked(std::move(out));
}

double CouplingMatrix::upper_dot(const CouplingMatrix& other) const {
  // Diagonals are zero, so the full Frobenius product double counts exactly.
  return 0.5 * entries_.cwiseProduct(other.entries_).sum();
}

CouplingMatrix operator+(const CouplingMatrix& a, const CouplingMatrix& b) {
  return CouplingMatrix::unchecked(a.matrix() + b.matrix());
}
CouplingMatrix operator-(const CouplingMatrix& a, const CouplingMatrix& b) {
  return CouplingMatrix::unchecked(a.matrix() - b.matrix());
}
CouplingMatrix operator*(double s, const CouplingMatrix& a) {
  return CouplingMatrix::unchecked(s * a.matrix());
}

IsingModel IsingModel::with_zero_field(CouplingMatrix j) {
  const int n = j.size();
  return IsingModel{std::move(j), Vector::Zero(n)};
}

IsingModel IsingModel::checked(Matrix coupling, Vector field) {
  IsingModel m{CouplingMatrix::unchecked(std::move(coupling)), std::move(field)};
  auto errors = validate_model(m);
  if (!errors.empty()) throw ValidationError(join(errors));
  return m;
}

SampleBatch::SampleBatch(Spins spins) : spins_(std::move(spins)) {
  for (Eigen::Index k = 0; k < spins_.rows(); ++k)
    for (Eigen::Index i = 0; i < spins_.cols(); ++i) {
      const int v = spins_(k, i);
      if (v != 1 && v != -1) {
        std::ostringstream msg;
        msg << "spin at sample " << k << ", site " << i << " is " << v << ", expected -1 or 1";
        throw ValidationError(msg.str());
      }
    }
}

SampleBatch SampleBatch::slice(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > this->count())
    throw ParameterError("sample slice out of range");
  SampleBatch out;
  out.spins_ = spins_.middleRows(begin, count);
  return out;
}

double infinity_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Vector symmetric_eigenvalues(const Matrix& m) {
  if (m.rows() == 0) return Vector();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double operator_norm(const CouplingMatrix& j) {
  if (j.size() == 0) return 0.0;
  return symmetric_eigenvalues(j.matrix()).cwiseAbs().maxCoeff();
}

MatrixNorms matrix_norms(const CouplingMatrix& j) {
  if (!j.matrix().allFinite()) throw ValidationError("matrix has non-finite entries");
  return MatrixNorms{infinity_norm(j.matrix()), operator_norm(j), j.matrix().norm()};
}

std::vector<std::string> validate_coupling(const Matrix& j) {
  std::vector<std::string> errors;
  if (j.rows() != j.cols()) {
    std::ostringstream msg;
    msg << "coupling not square (" << j.rows() << "x" << j.cols() << ")";
    errors.push_back(msg.str());
    return errors;
  }
  const Eigen::Index n = j.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k)
      if (!std::isfinite(j(i, k))) {
        std::ostringstream msg;
        msg << "non-finite entry at (" << i << "," << k << ")";
        errors.push_back(msg.str());
      }
  for (Eigen::Index i = 0; i < n; ++i)
    if (j(i, i) != 0.0 && std::isfinite(j(i, i))) errors.push_back("nonzero diagonal at " + std::to_string(i));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = i + 1; k < n; ++k)
      if (std::isfinite(j(i, k)) && std::isfinite(j(k, i)) && j(i, k) != j(k, i)) {
        std::ostringstream msg;
        msg << "asymmetry at (" << i << "," << k << ")";
        errors.push_back(msg.str());
      }
  return errors;
}

std::vector<std::string> validate_model(const IsingModel& m) {
  auto errors = validate_coupling(m.coupling.matrix());
  if (m.field.size() != m.coupling.matrix().rows()) {
    errors.push_back("field length mismatch (expected " + std::to_string(m.coupling.matrix().rows()) +
                     ", got " + std::to_string(m.field.size()) + ")");
  }
  for (Eigen::Index i = 0; i < m.field.size(); ++i)
    if (!std::isfinite(m.field(i))) errors.push_back("non-finite field at " + std::to_string(i));
  return errors;
}

Vector spins_from_index(std::uint64_t index, int n) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x(i) = ((index >> i) & 1U) ? 1.0 : -1.0;
  return x;
}

}  // namespace isinglearn
