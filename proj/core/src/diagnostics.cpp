#include "isinglearn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "isinglearn/errors.hpp"
#include "isinglearn/mple.hpp"
#include "isinglearn/rng.hpp"
#include "isinglearn/sampler.hpp"

namespace isinglearn {
namespace {

double submatrix_width(const Matrix& j, const std::vector<int>& nodes) {
  double width = 0.0;
  for (int a : nodes) {
    double row = 0.0;
    for (int b : nodes) row += std::abs(j(a, b));
    width = std::max(width, row);
  }
  return width;
}

bool contains(const std::vector<int>& subset, int v) {
  return std::find(subset.begin(), subset.end(), v) != subset.end();
}

// Width of J_{S+u, S+u} stays <= eta.
bool can_add(const Matrix& j, const std::vector<int>& subset, int u, double eta) {
  double row_u = 0.0;
  for (int w : subset) {
    row_u += std::abs(j(u, w));
    double row_w = std::abs(j(w, u));
    for (int z : subset) row_w += std::abs(j(w, z));
    if (row_w > eta) return false;
  }
  return row_u <= eta;
}

CouplingMatrix random_direction(int n, CounterRng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) a(i, k) = a(k, i) = normal(rng);
  return CouplingMatrix::unchecked(std::move(a));
}

}  // namespace

SubsetDecomposition subset_decomposition(const CouplingMatrix& j, double width_bound, double eta,
                                         std::uint64_t seed, const SubsetOptions& opts) {
  const int n = j.size();
  const Matrix& jm = j.matrix();
  if (!(eta > 0.0 && eta < width_bound)) throw ParameterError("subset decomposition needs 0 < eta < M");
  const double width = infinity_norm(jm);
  if (width > width_bound) throw ParameterError("subset decomposition: |J|_inf exceeds the width bound M");

  SubsetDecomposition out;
  out.eta = eta;
  if (width <= eta) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    out.subsets.push_back(std::move(all));
    out.membership_count.assign(n, 1);
    out.target_count = 1;
    return out;
  }

  CounterRng rng(derive_stream(seed, "subset_decomposition"));
  const double log_n = std::log(std::max(n, 2));
  const int r = static_cast<int>(std::ceil(opts.c * width_bound * width_bound * log_n / (eta * eta)));
  const double p = eta / (8.0 * width_bound);

  std::vector<std::vector<int>> subsets(r);
  for (auto& subset : subsets) {
    double violating = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= opts.resample_budget)
        throw ConstructionError("subset decomposition: resample budget exhausted; last submatrix width " +
                                std::to_string(violating) + " exceeds eta " + std::to_string(eta));
      subset.clear();
      for (int v = 0; v < n; ++v)
        if (rng.uniform() < p) subset.push_back(v);
      violating = submatrix_width(jm, subset);
      if (violating <= eta) break;
    }
  }

  std::vector<int> count(n, 0);
  for (const auto& subset : subsets)
    for (int v : subset) ++count[v];
  out.target_count = std::max(1, static_cast<int>(std::ceil(eta * r / (8.0 * width_bound))));
  const int target = out.target_count;

  auto random_index = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };

  // Removing a node never increases a submatrix width.
  for (int v = 0; v < n; ++v) {
    if (count[v] <= target) continue;
    std::vector<std::size_t> holders;
    for (std::size_t s = 0; s < subsets.size(); ++s)
      if (contains(subsets[s], v)) holders.push_back(s);
    std::shuffle(holders.begin(), holders.end(), rng);
    for (std::size_t k = 0; count[v] > target; ++k) {
      auto& subset = subsets[holders[k]];
      subset.erase(std::find(subset.begin(), subset.end(), v));
      --count[v];
    }
  }

  // Adding may violate the width bound: probe random subsets, fall back to a
  // fresh subset (a singleton always has width 0).
  for (int u = 0; u < n; ++u) {
    while (count[u] < target) {
      bool placed = false;
      for (int t = 0; t < opts.placement_tries && !placed; ++t) {
        auto& subset = subsets[random_index(subsets.size())];
        if (!contains(subset, u) && can_add(jm, subset, u, eta)) {
          subset.push_back(u);
          placed = true;
        }
      }
      if (!placed) subsets.push_back({u});
      ++count[u];
    }
  }

  for (auto& subset : subsets) std::sort(subset.begin(), subset.end());
  std::erase_if(subsets, [](const std::vector<int>& s) { return s.empty(); });
  out.subsets = std::move(subsets);
  out.membership_count = std::move(count);
  return out;
}

SubsetCheck check_subset_decomposition(const CouplingMatrix& j, const SubsetDecomposition& dec) {
  const int n = j.size();
  SubsetCheck check;
  std::vector<int> count(n, 0);
  for (const auto& subset : dec.subsets) {
    check.max_width = std::max(check.max_width, submatrix_width(j.matrix(), subset));
    for (int v : subset) {
      if (v < 0 || v >= n) return check;
      ++count[v];
    }
  }
  if (n > 0) {
    check.min_count = *std::min_element(count.begin(), count.end());
    check.max_count = *std::max_element(count.begin(), count.end());
  }
  check.widths_ok = check.max_width <= dec.eta;
  check.balanced = check.min_count == check.max_count && check.min_count > 0;
  return check;
}

RegularityReport regularity_ratios(const IsingModel& model, const std::vector<CouplingMatrix>& directions,
                                   double gamma, int cap) {
  check_enumeration_cap(model.size(), cap);
  const DistributionTable base = distribution(model, cap);
  RegularityReport report;
  report.gamma_probe = gamma;
  for (std::size_t id = 0; id < directions.size(); ++id) {
    const CouplingMatrix& raw = directions[id];
    const double base_second = moments(base, raw).second;
    if (!(base_second > 0.0) || !(gamma > 0.0)) {
      report.excluded.push_back(static_cast<int>(id));
      continue;
    }
    const CouplingMatrix a = std::sqrt(gamma / base_second) * raw;
    RegularityEntry entry;
    entry.id = static_cast<int>(id);
    entry.e_jstar = moments(base, a).second;
    const IsingModel perturbed{model.coupling + a, model.field};
    entry.e_j = moments(perturbed, a, cap).second;
    entry.ratio = entry.e_j / entry.e_jstar;
    report.max_ratio = std::max(report.max_ratio, entry.ratio);
    report.ratios.push_back(entry);
  }
  return report;
}

RegularityReport regularity_probe(const IsingModel& model, double gamma, int num_perturbations, std::uint64_t seed,
                                  int cap) {
  check_enumeration_cap(model.size(), cap);
  if (num_perturbations < 1) throw ParameterError("num_perturbations must be >= 1");
  CounterRng rng(derive_stream(seed, "regularity_probe"));
  std::vector<CouplingMatrix> directions;
  directions.reserve(num_perturbations);
  for (int k = 0; k < num_perturbations; ++k) directions.push_back(random_direction(model.size(), rng));
  return regularity_ratios(model, directions, gamma, cap);
}

MetricComparison metric_comparison(const IsingModel& model, const CouplingMatrix& other, int cap) {
  if (other.size() != model.size()) throw ParameterError("metric comparison: dimension mismatch");
  const CouplingMatrix delta = other - model.coupling;
  MetricComparison out;
  out.e_jstar = moments(model, delta, cap).second;
  out.frob_sq = delta.matrix().squaredNorm();
  out.degenerate = out.frob_sq == 0.0;
  out.ratio = out.degenerate ? std::numeric_limits<double>::quiet_NaN() : out.e_jstar / out.frob_sq;
  return out;
}

TvFrobeniusResult tv_frobenius_check(const IsingModel& m1, const IsingModel& m2, int cap) {
  if (m1.size() != m2.size()) throw ParameterError("tv/frobenius check: dimension mismatch");
  if (!m1.field.isZero(0.0) || !m2.field.isZero(0.0))
    throw ParameterError("tv/frobenius check requires zero external fields");
  const DistributionTable p = distribution(m1, cap);
  const DistributionTable q = distribution(m2, cap);
  TvFrobeniusResult out;
  out.tv = tv_distance(p, q);
  out.frob = (m1.coupling.matrix() - m2.coupling.matrix()).norm();
  out.bound_ok = out.tv <= m1.size() * out.frob;
  out.kl = kl_divergence(p, q);
  out.pinsker_slack = std::sqrt(out.kl / 2.0) - out.tv;
  return out;
}

GradientConcentration gradient_concentration_probe(const IsingModel& model, const CouplingMatrix& direction, int l,
                                                   int batches, std::uint64_t seed, int cap) {
  check_enumeration_cap(model.size(), cap);
  if (l < 1 || batches < 2) throw ParameterError("gradient concentration probe needs l >= 1 and batches >= 2");
  if (direction.size() != model.size()) throw ParameterError("gradient concentration probe: dimension mismatch");
  GradientConcentration out;
  out.values.reserve(batches);
  const std::uint64_t root = derive_stream(seed, "gradient_concentration");
  for (int b = 0; b < batches; ++b) {
    const SampleBatch batch = exact_sample(model, l, CounterRng(root).split(static_cast<std::uint64_t>(b)).key(), cap);
    const PseudolikelihoodContext ctx(batch, model.field);
    out.values.push_back(ctx.directional_derivatives(model.coupling, direction).first);
  }
  double sum = 0.0;
  for (double v : out.values) sum += v;
  out.mean = sum / batches;
  double ss = 0.0;
  for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / (batches - 1));
  out.t_statistic = out.stddev > 0.0 ? out.mean / (out.stddev / std::sqrt(static_cast<double>(batches))) : 0.0;
  const double unit = direction.matrix().norm() * std::sqrt(static_cast<double>(l));
  constexpr std::array<double, 3> kLevels{1.0, 2.0, 4.0};
  for (std::size_t t = 0; t < kLevels.size(); ++t) {
    const auto hits = std::count_if(out.values.begin(), out.values.end(),
                                    [&](double v) { return std::abs(v) > kLevels[t] * unit; });
    out.exceedance[t] = static_cast<double>(hits) / batches;
  }
  return out;
}

}  // namespace isinglearn
