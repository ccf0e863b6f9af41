#include <doctest.h>

#include <cmath>
#include <random>

#include "isinglearn/ensembles.hpp"
#include "isinglearn/errors.hpp"
#include "isinglearn/exact.hpp"
#include "isinglearn/sampler.hpp"
#include "test_support.hpp"

using namespace isinglearn;

TEST_CASE("conditional probability closed forms") {
  const IsingModel zero = IsingModel::with_zero_field(CouplingMatrix::zero(4));
  CHECK(conditional_plus_probability(zero, Vector::Ones(4), 2) == 0.5);

  IsingModel saturated = IsingModel::with_zero_field(CouplingMatrix::zero(3));
  saturated.field(1) = 10.0;
  CHECK(conditional_plus_probability(saturated, -Vector::Ones(3), 1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(conditional_plus_probability(saturated, Vector::Ones(3), 3), ParameterError);
}

TEST_CASE("conditional probability matches enumeration") {
  std::mt19937_64 rng(21);
  const int n = 4;
  const IsingModel m{testing::random_coupling(n, rng, 0.7), testing::random_field(n, rng)};
  const auto probs = testing::brute_force_probs(m);
  for (std::uint64_t s = 0; s < 16; ++s)
    for (int i = 0; i < n; ++i) {
      const std::uint64_t plus = s | (1ULL << i);
      const std::uint64_t minus = s & ~(1ULL << i);
      const double oracle = probs[plus] / (probs[plus] + probs[minus]);
      const double p = conditional_plus_probability(m, spins_from_index(s, n), i);
      CHECK(p == doctest::Approx(oracle).epsilon(1e-12));
      const Vector x = spins_from_index(s, n);
      Vector flipped = x;
      flipped(i) = -x(i);
      CHECK(conditional_plus_probability(m, flipped, i) == p);  // x_i is irrelevant
      CHECK(p + (1.0 - p) == 1.0);
    }
}

TEST_CASE("Glauber transition matrix is stationary at the exact law") {
  std::mt19937_64 rng(33);
  for (int n : {3, 6, 8}) {
    const IsingModel m{testing::random_coupling(n, rng, 0.5), testing::random_field(n, rng)};
    const Matrix p = glauber_transition_matrix(m);
    const DistributionTable pi = distribution(m);
    Eigen::RowVectorXd row = Eigen::Map<const Eigen::RowVectorXd>(pi.probs.data(), pi.probs.size());
    CHECK((row * p - row).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Glauber on the uniform product measure") {
  const IsingModel zero = IsingModel::with_zero_field(CouplingMatrix::zero(5));
  const int l = 100000;
  const SampleBatch batch = glauber_sample(zero, l, GlauberConfig::defaults(7));
  const Vector means = batch.as_real().colwise().mean();
  CHECK(means.cwiseAbs().maxCoeff() <= 4.0 / std::sqrt(static_cast<double>(l)));
}

TEST_CASE("Glauber matches the exact law of a Dobrushin model") {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::BoundedWidthRandom;
  spec.n = 6;
  spec.width = 0.3;
  spec.seed = 4;
  const IsingModel m = generate(spec);
  GlauberConfig cfg = GlauberConfig::defaults(1234);
  cfg.chains = 4;
  const SampleBatch batch = glauber_sample(m, 100000, cfg);
  CHECK(testing::tv(testing::empirical_table(batch), distribution(m).probs) <= 0.02);
}

TEST_CASE("Glauber is deterministic and chains own distinct streams") {
  std::mt19937_64 rng(1);
  const IsingModel m = IsingModel::with_zero_field(testing::random_coupling(5, rng, 0.2));
  GlauberConfig cfg = GlauberConfig::defaults(77);
  cfg.chains = 3;
  const SampleBatch a = glauber_sample(m, 1001, cfg);
  const SampleBatch b = glauber_sample(m, 1001, cfg);
  CHECK(a.spins() == b.spins());
  CHECK(a.count() == 1001);
  CHECK(glauber_stream_id(77, 0) != glauber_stream_id(77, 1));
  CHECK(glauber_stream_id(77, 1) != glauber_stream_id(77, 2));
  CHECK(glauber_stream_id(77, 0) != glauber_stream_id(78, 0));
}

TEST_CASE("Glauber defaults and validation") {
  CHECK(GlauberConfig::defaults(0).burn_in_sweeps == 200);
  CHECK(GlauberConfig::defaults(0).thinning_sweeps == 5);
  CHECK(GlauberConfig::defaults(0, 0.1).burn_in_sweeps == 500);
  CHECK(GlauberConfig::defaults(0, 0.3).burn_in_sweeps == 200);
  GlauberConfig bad;
  bad.thinning_sweeps = 0;
  CHECK_THROWS_AS(validate(bad), ParameterError);
  CHECK_THROWS_AS(glauber_sample(IsingModel::with_zero_field(CouplingMatrix::zero(2)), 0, GlauberConfig{}),
                  ParameterError);
}

TEST_CASE("exact sampler") {
  const int l = 200000;
  SUBCASE("single uniform spin") {
    const SampleBatch b = exact_sample(IsingModel::with_zero_field(CouplingMatrix::zero(1)), l, 3);
    CHECK(std::abs(b.as_real().mean()) <= 4.0 / std::sqrt(static_cast<double>(l)));
  }
  SUBCASE("two coupled spins") {
    Matrix j = Matrix::Zero(2, 2);
    j(0, 1) = j(1, 0) = 1.0;
    const SampleBatch b = exact_sample(IsingModel::with_zero_field(CouplingMatrix(j)), l, 4);
    const Matrix x = b.as_real();
    const double agree = ((x.col(0).array() * x.col(1).array()) > 0).cast<double>().mean();
    // P[x1 x2 = 1] = 2 e / (2e + 2/e) = e / (2 cosh 1)
    const double oracle = std::exp(1.0) / (2.0 * std::cosh(1.0));
    CHECK(std::abs(agree - oracle) <= 4.0 / std::sqrt(static_cast<double>(l)));
  }
  SUBCASE("SK draw, n = 8") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::SK;
    spec.n = 8;
    spec.beta = 1.0;
    spec.seed = 8;
    const IsingModel m = generate(spec);
    const SampleBatch b = exact_sample(m, 1000000, 5);
    CHECK(testing::tv(testing::empirical_table(b), testing::brute_force_probs(m)) <= 0.02);
  }
  CHECK_THROWS_AS(exact_sample(IsingModel::with_zero_field(CouplingMatrix::zero(21)), 1, 0), CapabilityError);
}
