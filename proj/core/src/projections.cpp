#include "isinglearn/projections.hpp"

#include <algorithm>
#include <deque>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "isinglearn/errors.hpp"

namespace isinglearn {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// V f(D) V^T for the symmetric eigendecomposition of m.
template <typename F>
Matrix spectral_map(const Matrix& m, F&& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  Vector values = eig.eigenvalues();
  f(values);
  return symmetrize(eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose());
}

// Columns form an orthonormal basis of the complement of the all-ones
// direction (Householder reflection sending e_0 to 1 / sqrt(n)).
Matrix ones_complement_basis(int n) {
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  v(0) -= 1.0;
  const double norm2 = v.squaredNorm();
  Matrix h = Matrix::Identity(n, n);
  if (norm2 > 0.0) h -= (2.0 / norm2) * v * v.transpose();
  return h.rightCols(n - 1);
}

Matrix project_antiferro(const AntiferroSpike& set, const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return Matrix::Zero(1, 1);
  const double spread = 1.0 - set.alpha;
  const Vector u = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  const Matrix q = ones_complement_basis(n);
  const double spike = u.dot(m * u);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(q.transpose() * m * q));
  Vector bulk = eig.eigenvalues();

  std::vector<IntervalTerm> terms;
  terms.reserve(n);
  for (Eigen::Index i = 0; i < bulk.size(); ++i) terms.push_back({bulk(i), 0.0, spread});
  terms.push_back({spike, -set.c, 0.0});
  const double offset = best_interval_offset(terms);

  bulk = bulk.cwiseMax(offset).cwiseMin(offset + spread);
  const double new_spike = std::clamp(spike, offset - set.c, offset);
  const Matrix qv = q * eig.eigenvectors();
  return symmetrize(new_spike * u * u.transpose() + qv * bulk.asDiagonal() * qv.transpose());
}

}  // namespace

void validate(const ConstraintSet& set) {
  std::visit(overloaded{
                 [](const OpNormBall& s) {
                   if (!(s.lambda > 0.0) || !std::isfinite(s.lambda))
                     throw ParameterError("constraint.lambda must be positive");
                 },
                 [](const SpectralSpread& s) {
                   if (!(s.spread > 0.0 && s.spread <= 1.0))
                     throw ParameterError("constraint.spread must lie in (0, 1]");
                 },
                 [](const WidthBall& s) {
                   if (!(s.width > 0.0) || !std::isfinite(s.width))
                     throw ParameterError("constraint.width must be positive");
                 },
                 [](const AntiferroSpike& s) {
                   if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ParameterError("constraint.alpha must lie in (0, 1)");
                   if (!(s.c > 0.0) || !std::isfinite(s.c)) throw ParameterError("constraint.c must be positive");
                 },
             },
             set);
}

std::string describe(const ConstraintSet& set) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const OpNormBall& s) { out << "OpNormBall(" << s.lambda << ")"; },
                 [&](const SpectralSpread& s) { out << "SpectralSpread(" << s.spread << ")"; },
                 [&](const WidthBall& s) { out << "WidthBall(" << s.width << ")"; },
                 [&](const AntiferroSpike& s) { out << "AntiferroSpike(" << s.alpha << ";" << s.c << ")"; },
             },
             set);
  return out.str();
}

Vector project_l1_ball(const Vector& v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> mags(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) mags[i] = std::abs(v(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (mags[j] - candidate > 0.0) threshold = candidate;
  }
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::max(std::abs(v(i)) - threshold, 0.0);
    out(i) = std::copysign(shrunk, v(i));
  }
  return out;
}

double best_interval_offset(std::span<const IntervalTerm> terms) {
  if (terms.empty()) return 0.0;
  // Term k is satisfied for L in [a_k, b_k]; f(L) = sum dist(L, [a_k, b_k])^2
  // is convex and C^1, so scan pieces for the first zero of f'.
  std::vector<double> lows, highs;
  lows.reserve(terms.size());
  highs.reserve(terms.size());
  for (const auto& t : terms) {
    lows.push_back(t.value - t.hi);
    highs.push_back(t.value - t.lo);
  }
  std::sort(lows.begin(), lows.end());
  std::sort(highs.begin(), highs.end());
  std::vector<double> breaks(lows);
  breaks.insert(breaks.end(), highs.begin(), highs.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> low_suffix(lows.size() + 1, 0.0);
  for (std::size_t k = lows.size(); k-- > 0;) low_suffix[k] = low_suffix[k + 1] + lows[k];
  std::vector<double> high_prefix(highs.size() + 1, 0.0);
  for (std::size_t k = 0; k < highs.size(); ++k) high_prefix[k + 1] = high_prefix[k] + highs[k];

  for (std::size_t j = 0; j < breaks.size(); ++j) {
    const double left = breaks[j];
    const bool last = j + 1 == breaks.size();
    const double right = last ? std::numeric_limits<double>::infinity() : breaks[j + 1];
    // Active on the open piece (left, right): lows >= right, highs <= left.
    const std::size_t low_begin =
        last ? lows.size() : static_cast<std::size_t>(std::lower_bound(lows.begin(), lows.end(), right) - lows.begin());
    const std::size_t high_end =
        static_cast<std::size_t>(std::upper_bound(highs.begin(), highs.end(), left) - highs.begin());
    const double count = static_cast<double>((lows.size() - low_begin) + high_end);
    const double sum = low_suffix[low_begin] + high_prefix[high_end];
    if (count == 0.0) return left;
    const double stationary = sum / count;
    if (last || count * right - sum >= 0.0) return std::clamp(stationary, left, right);
  }
  return breaks.back();
}

double spread_interval_start(std::span<const double> values, double spread) {
  std::vector<IntervalTerm> terms;
  terms.reserve(values.size());
  for (double v : values) terms.push_back({v, 0.0, spread});
  return best_interval_offset(terms);
}

Matrix project_relaxed(const ConstraintSet& set, const Matrix& m) {
  return std::visit(
      overloaded{
          [&](const OpNormBall& s) {
            return spectral_map(m, [&](Vector& v) { v = v.cwiseMax(-s.lambda).cwiseMin(s.lambda); });
          },
          [&](const SpectralSpread& s) {
            return spectral_map(m, [&](Vector& v) {
              const double start = spread_interval_start(std::span<const double>(v.data(), v.size()), s.spread);
              v = v.cwiseMax(start).cwiseMin(start + s.spread);
            });
          },
          [&](const WidthBall& s) {
            Matrix out(m.rows(), m.cols());
            for (Eigen::Index i = 0; i < m.rows(); ++i)
              out.row(i) = project_l1_ball(m.row(i).transpose(), s.width).transpose();
            return out;
          },
          [&](const AntiferroSpike& s) { return project_antiferro(s, m); },
      },
      set);
}

bool membership(const ConstraintSet& set, const CouplingMatrix& j, double tol) {
  if (j.size() == 0) return true;
  return std::visit(overloaded{
                        [&](const OpNormBall& s) { return operator_norm(j) <= s.lambda + tol; },
                        [&](const SpectralSpread& s) {
                          const Vector v = symmetric_eigenvalues(j.matrix());
                          return v(v.size() - 1) - v(0) <= s.spread + tol;
                        },
                        [&](const WidthBall& s) { return infinity_norm(j.matrix()) <= s.width + tol; },
                        [&](const AntiferroSpike& s) {
                          return (project_antiferro(s, j.matrix()) - j.matrix()).norm() <= tol;
                        },
                    },
                    set);
}

ProjectionResult project(const ConstraintSet& set, const CouplingMatrix& j, const ProjectionOptions& opts) {
  validate(set);
  const Eigen::Index n = j.size();
  ProjectionResult result;
  const Matrix base = CouplingMatrix::symmetrized(j.matrix()).matrix();
  const auto to_s0 = [](const Matrix& y) { return CouplingMatrix::symmetrized(y).matrix(); };
  const auto dot = [](const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); };

  // S_0^n is a subspace, so Dykstra between B and S_0^n is unit-step gradient
  // descent on theta(W) = |z|^2 / 2 - dist(z, B)^2 / 2 with z = base + W and
  // W in the complement of S_0^n; the gradient is the complement part of
  // P_B(z). Run L-BFGS on theta, falling back to the Dykstra step whenever
  // the line search stalls.
  struct Point {
    Matrix w, y, grad;
    double value = 0.0;
  };
  const auto evaluate = [&](Matrix w) {
    Point p;
    const Matrix z = base + w;
    p.y = project_relaxed(set, z);
    p.grad = p.y - to_s0(p.y);
    p.value = 0.5 * z.squaredNorm() - 0.5 * (z - p.y).squaredNorm();
    p.w = std::move(w);
    return p;
  };

  constexpr std::size_t kMemory = 8;
  std::deque<std::pair<Matrix, Matrix>> memory;  // (s, y) pairs
  Point cur = evaluate(Matrix::Zero(n, n));
  result.residual = cur.grad.norm();
  result.converged = result.residual <= opts.tol;
  for (int it = 1; it <= opts.max_iter && !result.converged; ++it) {
    Matrix dir = -cur.grad;
    if (!memory.empty()) {
      std::vector<double> alpha(memory.size());
      for (std::size_t k = memory.size(); k-- > 0;) {
        const auto& [sk, yk] = memory[k];
        alpha[k] = dot(sk, dir) / dot(yk, sk);
        dir -= alpha[k] * yk;
      }
      const auto& [sl, yl] = memory.back();
      dir *= dot(sl, yl) / yl.squaredNorm();
      for (std::size_t k = 0; k < memory.size(); ++k) {
        const auto& [sk, yk] = memory[k];
        dir += (alpha[k] - dot(yk, dir) / dot(yk, sk)) * sk;
      }
      if (dot(dir, cur.grad) >= 0.0) {
        dir = -cur.grad;
        memory.clear();
      }
    }
    const double slope = dot(cur.grad, dir);
    Point next;
    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      next = evaluate(cur.w + t * dir);
      if (next.value <= cur.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      next = evaluate(cur.w - cur.grad);
      memory.clear();
    }
    Matrix sk = next.w - cur.w;
    Matrix yk = next.grad - cur.grad;
    const double step = sk.norm();
    if (dot(sk, yk) > 1e-12 * step * yk.norm()) {
      memory.emplace_back(std::move(sk), std::move(yk));
      if (memory.size() > kMemory) memory.pop_front();
    }
    cur = std::move(next);
    result.iterations = it;
    result.residual = std::max(cur.grad.norm(), step);
    result.converged = result.residual <= opts.tol;
  }
  result.matrix = CouplingMatrix::unchecked(to_s0(cur.y));
  return result;
}

}  // namespace isinglearn
