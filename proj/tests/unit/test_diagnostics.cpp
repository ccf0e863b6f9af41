#include <doctest.h>

#include <cmath>
#include <random>

#include "isinglearn/diagnostics.hpp"
#include "isinglearn/ensembles.hpp"
#include "isinglearn/errors.hpp"
#include "test_support.hpp"

using namespace isinglearn;

namespace {

IsingModel curie_weiss(int n, double beta) {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::CurieWeiss;
  spec.n = n;
  spec.beta = beta;
  return generate(spec);
}

IsingModel bounded_width(int n, double width, std::uint64_t seed) {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::BoundedWidthRandom;
  spec.n = n;
  spec.width = width;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST_CASE("subset decomposition: already narrow matrix is one subset") {
  std::mt19937_64 rng(1);
  const CouplingMatrix j = testing::width_coupling(10, 0.2, rng);
  const auto dec = subset_decomposition(j, 2.0, 0.3, 1);
  REQUIRE(dec.subsets.size() == 1);
  CHECK(dec.subsets[0].size() == 10);
  CHECK(check_subset_decomposition(j, dec).ok());

  const auto empty = subset_decomposition(CouplingMatrix::zero(12), 1.0, 0.5, 2);
  CHECK(check_subset_decomposition(CouplingMatrix::zero(12), empty).ok());
}

TEST_CASE("subset decomposition on a width-2 model") {
  const IsingModel m = bounded_width(100, 2.0, 3);
  const auto dec = subset_decomposition(m.coupling, 2.0, 1.0 / 3.0, 3);
  const SubsetCheck check = check_subset_decomposition(m.coupling, dec);
  CHECK(check.widths_ok);
  CHECK(check.balanced);
  CHECK(check.min_count == dec.target_count);
  CHECK(check.max_width <= 1.0 / 3.0);
}

TEST_CASE("subset checker catches violations") {
  const IsingModel m = bounded_width(20, 2.0, 4);
  auto dec = subset_decomposition(m.coupling, 2.0, 0.5, 4);
  REQUIRE(check_subset_decomposition(m.coupling, dec).ok());
  auto unbalanced = dec;
  unbalanced.subsets.push_back({0});
  CHECK_FALSE(check_subset_decomposition(m.coupling, unbalanced).balanced);
  auto wide = dec;
  std::vector<int> all(20);
  for (int i = 0; i < 20; ++i) all[i] = i;
  wide.subsets.push_back(all);
  CHECK_FALSE(check_subset_decomposition(m.coupling, wide).widths_ok);
}

TEST_CASE("subset decomposition parameter errors") {
  const IsingModel m = bounded_width(10, 2.0, 5);
  CHECK_THROWS_AS(subset_decomposition(m.coupling, 1.0, 0.5, 1), ParameterError);  // |J|_inf > M
  CHECK_THROWS_AS(subset_decomposition(m.coupling, 2.0, 2.5, 1), ParameterError);  // eta >= M
}

TEST_CASE("regularity probe") {
  const IsingModel dob = bounded_width(8, 0.5, 6);
  const RegularityReport r = regularity_probe(dob, 0.05, 100, 6);
  CHECK(r.ratios.size() == 100);
  CHECK(r.excluded.empty());
  CHECK(r.max_ratio <= 10.0);
  for (const auto& e : r.ratios) {
    CHECK(e.ratio >= 0.0);
    CHECK(e.e_jstar == doctest::Approx(0.05).epsilon(1e-10));
  }

  const RegularityReport cw = regularity_probe(curie_weiss(10, 1.5), 1.0 / 10.0, 30, 7);
  CHECK(std::isfinite(cw.max_ratio));
  CHECK(cw.max_ratio > 0.0);

  const RegularityReport degenerate = regularity_ratios(dob, {CouplingMatrix::zero(8)}, 0.05);
  CHECK(degenerate.ratios.empty());
  REQUIRE(degenerate.excluded.size() == 1);
  CHECK(degenerate.excluded[0] == 0);
}

TEST_CASE("regularity probe: gamma scaling rescales the base moment exactly") {
  const IsingModel dob = bounded_width(6, 0.5, 8);
  const RegularityReport a = regularity_probe(dob, 0.02, 10, 9);
  const RegularityReport b = regularity_probe(dob, 0.06, 10, 9);
  for (std::size_t k = 0; k < a.ratios.size(); ++k)
    CHECK(b.ratios[k].e_jstar == doctest::Approx(3.0 * a.ratios[k].e_jstar).epsilon(1e-12));
}

TEST_CASE("metric comparison") {
  std::mt19937_64 rng(10);
  const IsingModel free = IsingModel::with_zero_field(CouplingMatrix::zero(6));
  const MetricComparison uniform = metric_comparison(free, testing::random_coupling(6, rng));
  CHECK(uniform.ratio == doctest::Approx(1.0).epsilon(1e-12));

  double previous = 0.0;
  for (int n : {8, 10, 12}) {
    const MetricComparison c = metric_comparison(curie_weiss(n, 1.5), curie_weiss(n, 1.6).coupling);
    CHECK(c.ratio > 1.0);
    CHECK(c.ratio > previous);
    previous = c.ratio;
  }

  const IsingModel m = curie_weiss(5, 1.5);
  const MetricComparison same = metric_comparison(m, m.coupling);
  CHECK(same.degenerate);
  CHECK(same.e_jstar == 0.0);
  CHECK(same.frob_sq == 0.0);
  CHECK(std::isnan(same.ratio));
}

TEST_CASE("TV versus Frobenius") {
  const IsingModel m = curie_weiss(4, 0.7);
  const auto same = tv_frobenius_check(m, m);
  CHECK(same.tv == 0.0);
  CHECK(same.bound_ok);

  for (double beta : {0.01, 0.1, 0.5, 1.0, 4.0}) {
    Matrix j = Matrix::Zero(2, 2);
    j(0, 1) = j(1, 0) = beta;
    const auto r = tv_frobenius_check(IsingModel::with_zero_field(CouplingMatrix(j)),
                                      IsingModel::with_zero_field(CouplingMatrix::zero(2)));
    CHECK(r.tv == doctest::Approx(std::tanh(beta) / 2.0).epsilon(1e-13));
    CHECK(r.frob == doctest::Approx(std::sqrt(2.0) * beta));
    CHECK(r.bound_ok);
    CHECK(r.pinsker_slack >= -1e-15);
  }

  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const IsingModel a = IsingModel::with_zero_field(testing::random_coupling(n, rng, 0.1 + rep * 0.02));
    const IsingModel b = IsingModel::with_zero_field(testing::random_coupling(n, rng, 0.1 + rep * 0.02));
    CHECK(tv_frobenius_check(a, b).bound_ok);
  }

  IsingModel fielded = m;
  fielded.field(0) = 0.1;
  CHECK_THROWS_AS(tv_frobenius_check(m, fielded), ParameterError);
}

TEST_CASE("gradient concentration probe") {
  std::mt19937_64 rng(12);
  const IsingModel m = IsingModel::with_zero_field(testing::spectral_coupling(6, 0.8, rng));
  const CouplingMatrix a = testing::random_coupling(6, rng);
  std::vector<double> log_l, log_sd;
  for (int l : {100, 1000, 10000}) {
    const GradientConcentration g = gradient_concentration_probe(m, a, l, 200, 13);
    CHECK(std::abs(g.t_statistic) <= 4.0);
    CHECK(g.exceedance[2] <= g.exceedance[1]);
    CHECK(g.exceedance[1] <= g.exceedance[0]);
    CHECK(g.exceedance[2] < g.exceedance[0]);
    log_l.push_back(std::log(l));
    log_sd.push_back(std::log(g.stddev));
  }
  const double slope = (log_sd[2] - log_sd[0]) / (log_l[2] - log_l[0]);
  CHECK(slope >= 0.4);
  CHECK(slope <= 0.6);

  CHECK_THROWS_AS(gradient_concentration_probe(m, a, 10, 1, 1), ParameterError);
}

TEST_CASE("probes refuse models above the enumeration cap") {
  const IsingModel big = IsingModel::with_zero_field(CouplingMatrix::zero(21));
  CHECK_THROWS_AS(regularity_probe(big, 0.1, 1, 1), CapabilityError);
  CHECK_THROWS_AS(metric_comparison(big, CouplingMatrix::zero(21)), CapabilityError);
}
