#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "isinglearn/core.hpp"

namespace isinglearn {

enum class EnsembleKind { SK, DilutedSK, CurieWeiss, AntiferroExpander, BoundedWidthRandom };

std::string_view to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(std::string_view name);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::SK;
  int n = 8;
  double beta = 0.0;
  int d = 3;            // DilutedSK, AntiferroExpander
  double width = 1.0;   // BoundedWidthRandom
  std::uint64_t seed = 0;
};

/// Throws ParameterError for unrealizable parameters.
void validate(const EnsembleSpec& spec);

/// Interaction matrix drawn from the requested ensemble, h = 0.
///
/// SK: J_ij ~ N(0, beta^2 / n) on the upper triangle, mirrored.
/// DilutedSK: random d-regular graph, edge weights +-beta / sqrt(d - 1).
/// CurieWeiss: (beta / n)(11^T - I).
/// AntiferroExpander: -beta * adjacency of a random d-regular graph.
/// BoundedWidthRandom: Erdos-Renyi pattern with expected degree 3 and
/// uniform[-1, 1] weights, rescaled so the max row l1 norm equals `width`.
IsingModel generate(const EnsembleSpec& spec);

/// 0/1 adjacency of a uniform simple d-regular graph (configuration model
/// with full restarts). Throws ConstructionError if `max_restarts` pairings
/// all contain a self-loop or multi-edge.
Matrix random_regular_graph(int n, int d, std::uint64_t seed, int max_restarts = 100000);

}  // namespace isinglearn
