#include "isinglearn/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "isinglearn/errors.hpp"
#include "isinglearn/rng.hpp"

namespace isinglearn {
namespace {

constexpr std::string_view kKindNames[] = {"SK", "DilutedSK", "CurieWeiss", "AntiferroExpander",
                                           "BoundedWidthRandom"};

CounterRng stream_for(const EnsembleSpec& spec, std::string_view purpose) {
  return CounterRng(derive_stream(spec.seed, to_string(spec.kind), static_cast<std::uint64_t>(spec.n), purpose));
}

// One configuration-model pairing; empty result if it is not simple.
bool try_pairing(int n, int d, CounterRng& rng, Matrix& adj) {
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < d; ++k) stubs.push_back(v);
  std::shuffle(stubs.begin(), stubs.end(), rng);
  adj.setZero(n, n);
  for (std::size_t k = 0; k < stubs.size(); k += 2) {
    const int a = stubs[k];
    const int b = stubs[k + 1];
    if (a == b || adj(a, b) != 0.0) return false;
    adj(a, b) = adj(b, a) = 1.0;
  }
  return true;
}

}  // namespace

std::string_view to_string(EnsembleKind kind) { return kKindNames[static_cast<int>(kind)]; }

EnsembleKind ensemble_kind_from_string(std::string_view name) {
  for (int k = 0; k < 5; ++k)
    if (kKindNames[k] == name) return static_cast<EnsembleKind>(k);
  throw ParameterError("unknown ensemble kind \"" + std::string(name) + "\"");
}

void validate(const EnsembleSpec& spec) {
  if (spec.n < 1) throw ParameterError("ensemble.n must be positive");
  if (!(spec.beta >= 0.0) || !std::isfinite(spec.beta)) throw ParameterError("ensemble.beta must be finite and nonnegative");
  switch (spec.kind) {
    case EnsembleKind::DilutedSK:
    case EnsembleKind::AntiferroExpander:
      if (spec.d < 1) throw ParameterError("ensemble.d must be positive");
      if (spec.d >= spec.n) throw ParameterError("ensemble.d must be less than n");
      if ((static_cast<long long>(spec.n) * spec.d) % 2 != 0) throw ParameterError("ensemble: n*d must be even");
      if (spec.kind == EnsembleKind::DilutedSK && spec.d < 2)
        throw ParameterError("ensemble.d must be at least 2 for DilutedSK (weights use sqrt(d-1))");
      break;
    case EnsembleKind::BoundedWidthRandom:
      if (!(spec.width > 0.0) || !std::isfinite(spec.width)) throw ParameterError("ensemble.width must be positive");
      break;
    default:
      break;
  }
}

Matrix random_regular_graph(int n, int d, std::uint64_t seed, int max_restarts) {
  if (n < 1 || d < 0 || d >= n || (static_cast<long long>(n) * d) % 2 != 0)
    throw ParameterError("random regular graph needs n*d even and 0 <= d < n");
  CounterRng rng(derive_stream(seed, "random_regular_graph", static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(d)));
  Matrix adj;
  for (int attempt = 0; attempt < max_restarts; ++attempt)
    if (try_pairing(n, d, rng, adj)) return adj;
  throw ConstructionError("random regular graph: no simple pairing after " + std::to_string(max_restarts) +
                          " restarts (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
}

IsingModel generate(const EnsembleSpec& spec) {
  validate(spec);
  const int n = spec.n;
  Matrix j = Matrix::Zero(n, n);
  switch (spec.kind) {
    case EnsembleKind::SK: {
      auto rng = stream_for(spec, "couplings");
      std::normal_distribution<double> normal(0.0, spec.beta / std::sqrt(static_cast<double>(n)));
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) j(a, b) = j(b, a) = normal(rng);
      break;
    }
    case EnsembleKind::DilutedSK: {
      const Matrix adj = random_regular_graph(n, spec.d, stream_for(spec, "graph").key());
      auto rng = stream_for(spec, "signs");
      const double w = spec.beta / std::sqrt(static_cast<double>(spec.d - 1));
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (adj(a, b) != 0.0) j(a, b) = j(b, a) = (rng() & 1U) ? w : -w;
      break;
    }
    case EnsembleKind::CurieWeiss: {
      const double w = spec.beta / n;
      j.setConstant(w);
      j.diagonal().setZero();
      break;
    }
    case EnsembleKind::AntiferroExpander: {
      j = -spec.beta * random_regular_graph(n, spec.d, stream_for(spec, "graph").key());
      j.diagonal().setZero();
      break;
    }
    case EnsembleKind::BoundedWidthRandom: {
      auto rng = stream_for(spec, "couplings");
      const double p = n > 1 ? std::min(1.0, 3.0 / (n - 1)) : 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (rng.uniform() < p) j(a, b) = j(b, a) = 2.0 * rng.uniform() - 1.0;
      const double width = infinity_norm(j);
      if (width > 0.0) {
        // Rounding can leave a row a few ulps above the target; shrink until it is not.
        double factor = spec.width / width;
        Matrix scaled = factor * j;
        while (infinity_norm(scaled) > spec.width) {
          factor = std::nextafter(factor, 0.0);
          scaled = factor * j;
        }
        j = std::move(scaled);
      }
      break;
    }
  }
  return IsingModel{CouplingMatrix(std::move(j)), Vector::Zero(n)};
}

}  // namespace isinglearn
