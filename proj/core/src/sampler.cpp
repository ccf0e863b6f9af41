#include "isinglearn/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <vector>

#include "isinglearn/errors.hpp"
#include "isinglearn/exact.hpp"
#include "isinglearn/rng.hpp"

namespace isinglearn {
namespace {

// One chain: returns `count` configurations, row-major.
std::vector<std::int8_t> run_chain(const IsingModel& m, int count, const GlauberConfig& cfg, int chain) {
  const int n = m.size();
  const Matrix& j = m.coupling.matrix();
  CounterRng rng(glauber_stream_id(cfg.seed, chain));

  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = (rng() & 1U) ? 1.0 : -1.0;
  // local[i] = J_i x + h_i, updated incrementally on each flip
  std::vector<double> local(n);
  auto refresh = [&] {
    for (int i = 0; i < n; ++i) {
      double s = m.field(i);
      for (int k = 0; k < n; ++k) s += j(i, k) * x[k];
      local[i] = s;
    }
  };
  refresh();

  auto sweep = [&] {
    for (int step = 0; step < n; ++step) {
      const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      const double p_plus = 0.5 * (1.0 + std::tanh(local[i]));
      const double next = rng.uniform() < p_plus ? 1.0 : -1.0;
      if (next != x[i]) {
        const double delta = next - x[i];
        x[i] = next;
        for (int k = 0; k < n; ++k) local[k] += j(k, i) * delta;
      }
    }
  };

  for (int s = 0; s < cfg.burn_in_sweeps; ++s) sweep();
  std::vector<std::int8_t> out;
  out.reserve(static_cast<std::size_t>(count) * n);
  for (int k = 0; k < count; ++k) {
    for (int s = 0; s < cfg.thinning_sweeps; ++s) sweep();
    refresh();  // drop accumulated rounding from incremental updates
    for (int i = 0; i < n; ++i) out.push_back(x[i] > 0 ? 1 : -1);
  }
  return out;
}

}  // namespace

GlauberConfig GlauberConfig::defaults(std::uint64_t seed, std::optional<double> gap_hint) {
  GlauberConfig cfg;
  cfg.seed = seed;
  if (gap_hint && *gap_hint > 0.0) cfg.burn_in_sweeps = 50 * static_cast<int>(std::ceil(1.0 / *gap_hint));
  return cfg;
}

void validate(const GlauberConfig& cfg) {
  if (cfg.burn_in_sweeps < 1) throw ParameterError("glauber.burn_in_sweeps must be >= 1");
  if (cfg.thinning_sweeps < 1) throw ParameterError("glauber.thinning_sweeps must be >= 1");
  if (cfg.chains < 1) throw ParameterError("glauber.chains must be >= 1");
}

double conditional_plus_probability(const IsingModel& m, const Vector& x, int i) {
  if (i < 0 || i >= m.size()) throw ParameterError("site index " + std::to_string(i) + " out of range");
  if (x.size() != m.size()) throw ParameterError("configuration length does not match model dimension");
  const double local = m.coupling.matrix().row(i).dot(x) + m.field(i);
  return 0.5 * (1.0 + std::tanh(local));
}

std::uint64_t glauber_stream_id(std::uint64_t seed, int chain) {
  return derive_stream(seed, "glauber", static_cast<std::uint64_t>(chain));
}

SampleBatch glauber_sample(const IsingModel& m, int count, const GlauberConfig& cfg) {
  validate(cfg);
  if (count < 1) throw ParameterError("sample count must be >= 1");
  const int n = m.size();
  const int chains = std::min(cfg.chains, count);

  std::vector<std::future<std::vector<std::int8_t>>> jobs;
  for (int c = 0; c < chains; ++c) {
    const int per_chain = count / chains + (c < count % chains ? 1 : 0);
    jobs.push_back(std::async(chains > 1 ? std::launch::async : std::launch::deferred,
                              [&m, &cfg, per_chain, c] { return run_chain(m, per_chain, cfg, c); }));
  }
  std::vector<std::vector<std::int8_t>> results;
  for (auto& job : jobs) results.push_back(job.get());

  SampleBatch::Spins spins(count, n);
  for (int k = 0; k < count; ++k) {
    const auto& src = results[k % chains];
    const std::size_t row = static_cast<std::size_t>(k / chains) * n;
    for (int i = 0; i < n; ++i) spins(k, i) = src[row + i];
  }
  return SampleBatch(std::move(spins));
}

Matrix glauber_transition_matrix(const IsingModel& m, int cap) {
  const int n = m.size();
  check_enumeration_cap(n, cap);
  const auto states = static_cast<Eigen::Index>(std::uint64_t{1} << n);
  Matrix p = Matrix::Zero(states, states);
  for (Eigen::Index s = 0; s < states; ++s) {
    const Vector x = spins_from_index(static_cast<std::uint64_t>(s), n);
    for (int i = 0; i < n; ++i) {
      const double plus = conditional_plus_probability(m, x, i);
      const double stay = x(i) > 0 ? plus : 1.0 - plus;
      p(s, s) += stay / n;
      p(s, s ^ (Eigen::Index{1} << i)) += (1.0 - stay) / n;
    }
  }
  return p;
}

SampleBatch exact_sample(const IsingModel& m, int count, std::uint64_t seed, int cap) {
  if (count < 1) throw ParameterError("sample count must be >= 1");
  const DistributionTable table = distribution(m, cap);
  const int n = m.size();
  std::vector<double> cdf(table.probs.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < cdf.size(); ++s) {
    acc += table.probs[s];
    cdf[s] = acc;
  }
  CounterRng rng(derive_stream(seed, "exact_sample"));
  SampleBatch::Spins spins(count, n);
  for (int k = 0; k < count; ++k) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto state = static_cast<std::uint64_t>(it - cdf.begin());
    for (int i = 0; i < n; ++i) spins(k, i) = ((state >> i) & 1U) ? 1 : -1;
  }
  return SampleBatch(std::move(spins));
}

}  // namespace isinglearn
