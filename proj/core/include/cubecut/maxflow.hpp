#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cubecut/netbuild.hpp"

namespace cubecut {

/// Residual capacities at or below this are treated as saturated.
inline constexpr double kResidualEpsilon = 1e-12;

/// Result of a max-flow computation. Residual arc 2a is the forward copy of
/// network arc a, residual arc 2a+1 its reverse.
struct FlowState {
  std::vector<double> residual;
  double flow_value = 0.0;

  /// Net flow carried by network arc a.
  double arc_flow(const FlowNetwork& net, std::size_t a) const {
    return net.arcs[a].capacity - residual[2 * a];
  }
};

/// Boykov-Kolmogorov max-flow: two search trees rooted at the terminals are
/// grown, joined into augmenting paths, and repaired by adoption. Trees
/// persist across augmentations. Throws on negative or NaN capacities.
FlowState bk_maxflow(const FlowNetwork& net);

/// Source side of the minimum cut: nodes reachable from the source along
/// residual arcs with capacity above kResidualEpsilon. Entry v is 1 when v is
/// on the source side.
std::vector<std::uint8_t> min_cut_partition(const FlowNetwork& net, const FlowState& state);

/// Sum of capacities of arcs leaving the source side.
double cut_capacity(const FlowNetwork& net, std::span<const std::uint8_t> source_side);

}  // namespace cubecut
