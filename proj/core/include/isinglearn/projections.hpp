#pragma once

#include <span>
#include <string>
#include <variant>

#include "isinglearn/core.hpp"

namespace isinglearn {

/// {J : |J|_op <= lambda}
struct OpNormBall {
  double lambda = 1.0;
};

/// {J : lambda_max(J) - lambda_min(J) <= spread}
struct SpectralSpread {
  double spread = 1.0;
};

/// {J : max_i sum_j |J_ij| <= width}
struct WidthBall {
  double width = 1.0;
};

/// {J : J + rI = -(t/n) 11^T + A for some r, t in [0, c], A 1 = 0,
///  0 <= A <= (1 - alpha) I}. Equivalently: 1 is an eigenvector of J, the
/// remaining spectrum lies in an interval [L, L + 1 - alpha] and the
/// eigenvalue on 1 lies in [L - c, L].
struct AntiferroSpike {
  double alpha = 0.5;
  double c = 1.0;
};

/// Each family is intersected with the symmetric zero-diagonal matrices.
using ConstraintSet = std::variant<OpNormBall, SpectralSpread, WidthBall, AntiferroSpike>;

/// Throws ParameterError on out-of-range parameters.
void validate(const ConstraintSet& set);
std::string describe(const ConstraintSet& set);

struct ProjectionOptions {
  double tol = 1e-8;
  int max_iter = 500;
};

struct ProjectionResult {
  CouplingMatrix matrix;  // last iterate, always symmetric with zero diagonal
  int iterations = 0;
  double residual = 0.0;  // max of the last dual step and the distance of P_B(z) to S_0^n
  bool converged = false;
};

bool membership(const ConstraintSet& set, const CouplingMatrix& j, double tol);

/// Frobenius-nearest point of set intersected with S_0^n. Dykstra's
/// alternating projections between S_0^n and the spectral / row set, run in
/// dual form with L-BFGS steps (the plain Dykstra step is the fallback).
/// `converged == false` is the convergence warning; the last iterate and
/// its residual are still returned.
ProjectionResult project(const ConstraintSet& set, const CouplingMatrix& j, const ProjectionOptions& opts = {});

/// Projection onto the spectral / row set alone (no zero-diagonal
/// constraint). Input must be symmetric.
Matrix project_relaxed(const ConstraintSet& set, const Matrix& m);

/// Euclidean projection onto {w : |w|_1 <= radius} by sort and threshold.
Vector project_l1_ball(const Vector& v, double radius);

/// Shift of an interval of width `spread` minimizing the squared distance
/// needed to move every value inside it; ties resolve to the leftmost shift.
/// Values are clipped into [result, result + spread].
double spread_interval_start(std::span<const double> values, double spread);

/// One term of a placement problem: value v should land in [L + lo, L + hi].
struct IntervalTerm {
  double value;
  double lo;
  double hi;
};

/// Leftmost L minimizing sum dist(v, [L + lo, L + hi])^2.
double best_interval_offset(std::span<const IntervalTerm> terms);

}  // namespace isinglearn
