#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "cubecut/ray_template.hpp"
#include "cubecut/volume.hpp"

namespace cubecut {

/// Placeholder for an unbounded capacity while a network is being assembled.
/// build_network replaces it by FlowNetwork::infinity.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Arc {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double capacity = 0.0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Two-terminal capacitated digraph. For networks built from a template,
/// node ids 0..n(k-1) are template nodes (0 is the seed), followed by the
/// source and the sink.
struct FlowNetwork {
  std::size_t node_count = 0;  // terminals included
  std::uint32_t source = 0;
  std::uint32_t sink = 1;
  std::vector<Arc> arcs;
  // Value standing in for an unbounded capacity: one more than the sum of
  // all finite capacities, so a cut through it is never minimal.
  double infinity = kUnbounded;

  bool is_infinite(const Arc& a) const { return a.capacity >= infinity; }
};

/// Loading coefficient: 1 at the seed, 0 at the last node, linear in between.
double w_coeff(int layer, int k);

/// Source/sink capacities of one node.
struct OLink {
  double s_cap = 0.0;
  double t_cap = 0.0;
  friend bool operator==(const OLink&, const OLink&) = default;
};

/// Terminal capacities along one ray. greys[0] is the seed grey, greys[k-1]
/// the outermost node. Entry i of the result belongs to layer i+1; unbounded
/// entries hold kUnbounded.
std::vector<OLink> ray_olinks(std::span<const double> greys, const SeedStats& stats);

/// Grey value at every template node (indexed by node id), trilinearly sampled.
std::vector<double> sample_node_greys(const Template& tmpl, const Volume& volume);

/// Terminal capacities for every template node, indexed by node id.
std::vector<OLink> weight_olinks(const Template& tmpl, std::span<const double> node_greys,
                                 const SeedStats& stats);
std::vector<OLink> weight_olinks(const Template& tmpl, const Volume& volume,
                                 const SeedStats& stats);

/// Unbounded arcs from each node to its predecessor on the same ray.
std::vector<Arc> add_zedges(const Template& tmpl);

/// Layer targeted by an xy-edge leaving layer `layer` under smoothness delta.
inline int xy_target_layer(int layer, int delta) { return layer - delta > 1 ? layer - delta : 1; }

/// Unbounded arcs v(r, i) -> v(r', max(i - delta, 1)) for both directions of
/// every ray adjacency. Seed-to-seed self loops are omitted.
std::vector<Arc> add_xyedges(const Template& tmpl, int delta);

FlowNetwork build_network(const Template& tmpl, std::span<const double> node_greys,
                          const SeedStats& stats, int delta);
FlowNetwork build_network(const Template& tmpl, const Volume& volume, const SeedStats& stats,
                          int delta);

/// Replaces kUnbounded capacities by 1 + (sum of finite capacities).
void finalize_infinity(FlowNetwork& net);

/// Plain-text arc list, one "from to capacity" line per arc. Terminals are
/// written as "s" and "t".
void write_arc_list(const FlowNetwork& net, std::ostream& os);

}  // namespace cubecut
