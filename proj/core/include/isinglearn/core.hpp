#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace isinglearn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric n x n real matrix with zero diagonal and finite entries.
///
/// The checked constructor enforces all three invariants exactly (tolerance
/// 0). `unchecked` exists for the validator and for intermediate values the
/// caller has constructed symmetric by mirroring.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  explicit CouplingMatrix(Matrix entries);

  static CouplingMatrix zero(int n);
  static CouplingMatrix unchecked(Matrix entries);
  /// Mirrors the strict upper triangle of `m` and zeroes the diagonal.
  static CouplingMatrix from_upper(const Matrix& m);
  /// (m + m^T) / 2 with the diagonal zeroed: the nearest point of S_0^n.
  static CouplingMatrix symmetrized(const Matrix& m);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  /// Inner product over the free parameters (strict upper triangle).
  double upper_dot(const CouplingMatrix& other) const;

  friend bool operator==(const CouplingMatrix& a, const CouplingMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
};

CouplingMatrix operator+(const CouplingMatrix& a, const CouplingMatrix& b);
CouplingMatrix operator-(const CouplingMatrix& a, const CouplingMatrix& b);
CouplingMatrix operator*(double s, const CouplingMatrix& a);

/// Coupling matrix J plus external field h; density proportional to
/// exp(x^T J x / 2 + h^T x) on {-1,+1}^n.
struct IsingModel {
  CouplingMatrix coupling;
  Vector field;

  int size() const { return coupling.size(); }

  /// Zero external field.
  static IsingModel with_zero_field(CouplingMatrix j);
  /// Validates and throws ValidationError listing every violation.
  static IsingModel checked(Matrix coupling, Vector field);
};

/// l spin configurations in {-1,+1}^n, one per row.
class SampleBatch {
 public:
  using Spins = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  SampleBatch() = default;
  explicit SampleBatch(Spins spins);

  int count() const { return static_cast<int>(spins_.rows()); }
  int dimension() const { return static_cast<int>(spins_.cols()); }
  const Spins& spins() const { return spins_; }
  /// Spins as doubles, l x n.
  Matrix as_real() const { return spins_.cast<double>(); }
  /// Rows [begin, begin + count).
  SampleBatch slice(int begin, int count) const;

 private:
  Spins spins_;
};

struct MatrixNorms {
  double infinity = 0.0;   // max row l1
  double op = 0.0;         // largest |eigenvalue|
  double frobenius = 0.0;
};

MatrixNorms matrix_norms(const CouplingMatrix& j);
double infinity_norm(const Matrix& m);
double operator_norm(const CouplingMatrix& j);

/// Ascending eigenvalues of a symmetric matrix.
Vector symmetric_eigenvalues(const Matrix& m);

/// Every violated invariant, one message each; empty iff valid.
std::vector<std::string> validate_model(const IsingModel& m);
std::vector<std::string> validate_coupling(const Matrix& j);

/// Spin configuration for enumeration index `index`: bit i set means x_i = +1.
Vector spins_from_index(std::uint64_t index, int n);

}  // namespace isinglearn
