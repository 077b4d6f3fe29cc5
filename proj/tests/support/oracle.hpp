#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cubecut/netbuild.hpp"

namespace cubecut::testing {

struct ReferenceCut {
  double value = 0.0;
  std::vector<std::uint8_t> source_side;  // per node id
};

/// Minimum s-t cut by enumerating every partition of the non-terminal
/// nodes. Among equal-valued cuts the one with the fewest source-side nodes
/// (then lowest mask) is returned. Throws for more than 20 non-terminals.
ReferenceCut exhaustive_mincut(const FlowNetwork& net);

/// Shortest-augmenting-path (Edmonds-Karp) max flow; source side is the
/// residual reachable set.
ReferenceCut edmonds_karp_mincut(const FlowNetwork& net);

/// Random network with `inner` non-terminal nodes, each ordered pair
/// (terminals included, no arcs into s or out of t) present with
/// probability `density`, capacities uniform in [0, max_cap].
FlowNetwork random_network(std::mt19937_64& rng, int inner, double density, double max_cap);

}  // namespace cubecut::testing
