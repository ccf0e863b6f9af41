#pragma once

#include <cstdint>
#include <optional>

#include "isinglearn/core.hpp"

namespace isinglearn {

struct GlauberConfig {
  int burn_in_sweeps = 200;
  int thinning_sweeps = 5;
  std::uint64_t seed = 0;
  int chains = 1;

  /// Defaults with burn-in 50 * ceil(1 / alpha) when a spectral-gap hint is
  /// available, 200 sweeps otherwise.
  static GlauberConfig defaults(std::uint64_t seed, std::optional<double> gap_hint = std::nullopt);
};

void validate(const GlauberConfig& cfg);

/// P[X_i = +1 | X_{-i} = x_{-i}] = (1 + tanh(J_i x + h_i)) / 2.
double conditional_plus_probability(const IsingModel& m, const Vector& x, int i);

/// Glauber dynamics with uniformly random site updates. `chains` chains
/// start from independent uniform configurations; sample k comes from chain
/// k mod chains. Chains run concurrently, each on its own RNG stream.
SampleBatch glauber_sample(const IsingModel& m, int count, const GlauberConfig& cfg);

/// RNG stream key owned by one Glauber chain.
std::uint64_t glauber_stream_id(std::uint64_t seed, int chain);

/// Dense 2^n x 2^n transition matrix of one uniform-site heat-bath update,
/// assembled from conditional_plus_probability. States as in spins_from_index.
Matrix glauber_transition_matrix(const IsingModel& m, int cap = 8);

inline constexpr int kDefaultEnumerationCap = 20;

/// I.i.d. samples by inverse CDF over the full 2^n table.
SampleBatch exact_sample(const IsingModel& m, int count, std::uint64_t seed, int cap = kDefaultEnumerationCap);

}  // namespace isinglearn
