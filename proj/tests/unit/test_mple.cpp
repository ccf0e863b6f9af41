#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isinglearn/ensembles.hpp"
#include "isinglearn/errors.hpp"
#include "isinglearn/mple.hpp"
#include "isinglearn/sampler.hpp"
#include "test_support.hpp"

using namespace isinglearn;

namespace {

CouplingMatrix pair_bump(int n, int i, int k, double eps) {
  Matrix e = Matrix::Zero(n, n);
  e(i, k) = e(k, i) = eps;
  return CouplingMatrix::unchecked(e);
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_CASE("objective closed forms") {
  std::mt19937_64 rng(1);
  const int n = 6, l = 40;
  const SampleBatch batch = testing::random_batch(l, n, rng);
  const PseudolikelihoodContext ctx(batch, Vector::Zero(n));
  CHECK(ctx.objective(CouplingMatrix::zero(n)) == doctest::Approx(n * l * std::numbers::ln2).epsilon(1e-14));

  // A single all-ones sample under Curie-Weiss: every local field is beta (n-1)/n.
  const double beta = 1.3;
  EnsembleSpec spec;
  spec.kind = EnsembleKind::CurieWeiss;
  spec.n = n;
  spec.beta = beta;
  const IsingModel cw = generate(spec);
  const PseudolikelihoodContext one(SampleBatch(SampleBatch::Spins::Ones(1, n)), Vector::Zero(n));
  const double c = beta * (n - 1) / n;
  const double site = std::log(std::cosh(c)) - c + std::numbers::ln2;
  CHECK(one.objective(cw.coupling) == doctest::Approx(n * site).epsilon(1e-13));
}

TEST_CASE("objective is invariant to sample order") {
  std::mt19937_64 rng(2);
  const SampleBatch batch = testing::random_batch(30, 5, rng);
  SampleBatch::Spins reversed = batch.spins().colwise().reverse();
  const CouplingMatrix j = testing::random_coupling(5, rng);
  const Vector h = testing::random_field(5, rng);
  CHECK(PseudolikelihoodContext(batch, h).objective(j) ==
        doctest::Approx(PseudolikelihoodContext(SampleBatch(reversed), h).objective(j)).epsilon(1e-14));
}

TEST_CASE("logcosh is stable") {
  CHECK(logcosh(0.0) == 0.0);
  CHECK(logcosh(1000.0) == doctest::Approx(1000.0 - std::numbers::ln2));
  CHECK(logcosh(-0.3) == doctest::Approx(std::log(std::cosh(0.3))).epsilon(1e-15));
}

TEST_CASE("gradient at zero") {
  std::mt19937_64 rng(3);
  const int n = 5, l = 25;
  const SampleBatch batch = testing::random_batch(l, n, rng);
  const PseudolikelihoodContext ctx(batch, Vector::Zero(n));
  const CouplingMatrix g = ctx.gradient(CouplingMatrix::zero(n));
  const Matrix x = batch.as_real();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      CHECK(g(i, k) == doctest::Approx(i == k ? 0.0 : -2.0 * x.col(i).dot(x.col(k))).epsilon(1e-14));
  CHECK(g.matrix() == g.matrix().transpose());
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(4);
  const int n = 10, l = 100;
  const double step = 1e-5;
  for (int rep = 0; rep < 5; ++rep) {
    const SampleBatch batch = testing::random_batch(l, n, rng);
    const PseudolikelihoodContext ctx(batch, testing::random_field(n, rng));
    const CouplingMatrix j = testing::random_coupling(n, rng, 0.3);
    const CouplingMatrix g = ctx.gradient(j);
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) {
        const double fd = (ctx.objective(j + pair_bump(n, i, k, step)) - ctx.objective(j - pair_bump(n, i, k, step))) /
                          (2.0 * step);
        CHECK(relative_error(g(i, k), fd) <= 1e-6);
      }
  }
}

TEST_CASE("directional derivatives") {
  std::mt19937_64 rng(5);
  const int n = 7, l = 60;
  const SampleBatch batch = testing::random_batch(l, n, rng);
  const PseudolikelihoodContext ctx(batch, testing::random_field(n, rng));

  SUBCASE("at zero the second derivative is half the sum of squares") {
    const PseudolikelihoodContext free(batch, Vector::Zero(n));
    const CouplingMatrix a = testing::random_coupling(n, rng);
    const Matrix ax = batch.as_real() * a.matrix();
    CHECK(free.directional_derivatives(CouplingMatrix::zero(n), a).second ==
          doctest::Approx(0.5 * ax.squaredNorm()).epsilon(1e-13));
  }

  SUBCASE("match 1-D finite differences with the factor 2") {
    const double h = 1e-4;
    for (int rep = 0; rep < 10; ++rep) {
      const CouplingMatrix j = testing::random_coupling(n, rng, 0.3);
      const CouplingMatrix a = testing::random_coupling(n, rng, 0.5);
      const auto d = ctx.directional_derivatives(j, a);
      const double f0 = ctx.objective(j);
      const double fp = ctx.objective(j + h * a);
      const double fm = ctx.objective(j - h * a);
      CHECK(relative_error(2.0 * d.first, (fp - fm) / (2.0 * h)) <= 1e-5);
      CHECK(relative_error(2.0 * d.second, (fp - 2.0 * f0 + fm) / (h * h)) <= 1e-5);
      // Full gradient and the half-weighted directional form agree.
      CHECK(relative_error(ctx.gradient(j).upper_dot(a), 2.0 * d.first) <= 1e-12);
    }
  }
}

TEST_CASE("convexity") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int l = 1 + static_cast<int>(rng() % 50);
    const SampleBatch batch = testing::random_batch(l, n, rng);
    const PseudolikelihoodContext ctx(batch, testing::random_field(n, rng));
    const CouplingMatrix j = testing::random_coupling(n, rng);
    const CouplingMatrix a = testing::random_coupling(n, rng);
    CHECK(ctx.directional_derivatives(j, a).second >= 0.0);
    CHECK(ctx.objective(j + a) - ctx.objective(j) - ctx.gradient(j).upper_dot(a) >= -1e-9);
  }
}

TEST_CASE("Lipschitz in operator norm") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int l = 1 + static_cast<int>(rng() % 40);
    const SampleBatch batch = testing::random_batch(l, n, rng);
    const PseudolikelihoodContext ctx(batch, Vector::Zero(n));
    const CouplingMatrix j1 = testing::random_coupling(n, rng);
    const CouplingMatrix j2 = testing::random_coupling(n, rng);
    const double gap = std::abs(ctx.objective(j1) - ctx.objective(j2));
    CHECK(gap <= n * l * operator_norm(j1 - j2) + 1e-9);
  }
}

TEST_CASE("Lipschitz constant needs a factor 2 in the worst case") {
  // One anti-aligned sample, J = t [[0,1],[1,0]]: phi(t) - phi(0) = 2 logcosh t + 2t,
  // which exceeds n l t = 2t but never 2 n l t = 4t.
  SampleBatch::Spins s(1, 2);
  s << 1, -1;
  const PseudolikelihoodContext ctx{SampleBatch(s), Vector::Zero(2)};
  for (double t : {0.5, 2.0, 10.0}) {
    const double gap = ctx.objective(pair_bump(2, 0, 1, t)) - ctx.objective(CouplingMatrix::zero(2));
    CHECK(gap == doctest::Approx(2.0 * std::log(std::cosh(t)) + 2.0 * t).epsilon(1e-12));
    CHECK(gap > 2.0 * t);
    CHECK(gap <= 4.0 * t);
  }
}

TEST_CASE("population gradient vanishes at the true matrix") {
  std::mt19937_64 rng(8);
  const int n = 5, l = 200, batches = 200;
  const IsingModel m{testing::random_coupling(n, rng, 0.3), testing::random_field(n, rng)};
  Matrix sum = Matrix::Zero(n, n), sum_sq = Matrix::Zero(n, n);
  for (int b = 0; b < batches; ++b) {
    const PseudolikelihoodContext ctx(exact_sample(m, l, 1000 + b), m.field);
    const Matrix g = ctx.gradient(m.coupling).matrix();
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const double mean = sum(i, k) / batches;
      const double var = (sum_sq(i, k) - batches * mean * mean) / (batches - 1);
      CHECK(std::abs(mean / std::sqrt(var / batches)) <= 4.0);
    }
}

TEST_CASE("workspace tracks the last evaluated matrix") {
  std::mt19937_64 rng(9);
  const SampleBatch batch = testing::random_batch(20, 4, rng);
  const PseudolikelihoodContext ctx(batch, Vector::Zero(4));
  CHECK(ctx.workspace_consistent());
  const CouplingMatrix j1 = testing::random_coupling(4, rng);
  const CouplingMatrix j2 = testing::random_coupling(4, rng);
  const double v1 = ctx.objective(j1);
  (void)ctx.gradient(j2);
  CHECK(ctx.workspace_consistent());
  CHECK(ctx.objective(j1) == v1);
  CHECK(ctx.workspace_consistent());
}

TEST_CASE("dimension mismatches") {
  std::mt19937_64 rng(10);
  const SampleBatch batch = testing::random_batch(5, 4, rng);
  CHECK_THROWS_AS(PseudolikelihoodContext(batch, Vector::Zero(3)), ParameterError);
  const PseudolikelihoodContext ctx(batch, Vector::Zero(4));
  CHECK_THROWS_AS(ctx.objective(CouplingMatrix::zero(5)), ParameterError);
  CHECK_THROWS_AS(ctx.directional_derivatives(CouplingMatrix::zero(4), CouplingMatrix::zero(3)), ParameterError);
}
