#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cubecut/geometry.hpp"

namespace cubecut {

using LatticePoint = std::array<int, 3>;

/// Integer points on the surface of the cube [0, m-1]^3, with the
/// 4-neighbourhood that wraps across cube edges.
struct SurfaceLattice {
  int m = 0;
  std::vector<LatticePoint> points;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacency;  // i < j

  /// Index into points for lattice coordinate p, or -1 for interior or
  /// out-of-range coordinates.
  std::int64_t index_of(const LatticePoint& p) const;

 private:
  friend SurfaceLattice cube_surface_lattice(int m);
  std::vector<std::int32_t> lookup_;  // m^3 entries
};

/// Builds the lattice; m points per cube edge, m >= 2.
/// Point count is 6m^2 - 12m + 8.
SurfaceLattice cube_surface_lattice(int m);

enum class TemplateKind { cube, sphere };

/// Star-shaped sampling template: n rays from a shared seed, k equidistant
/// nodes per ray (layer 1 is the seed itself).
struct Template {
  Vec3 seed{};
  TemplateKind kind = TemplateKind::cube;
  int k = 2;
  double scale = 0.0;  // cube half-edge or sphere radius, mm
  std::vector<Vec3> offsets;  // ray endpoint minus seed
  std::vector<std::pair<std::uint32_t, std::uint32_t>> neighbors;

  // Cube only: lattice that generated the rays (ray r <-> lattice.points[r]).
  SurfaceLattice lattice;
  // Sphere only.
  int n_theta = 0;
  int n_phi = 0;

  std::size_t ray_count() const { return offsets.size(); }

  Vec3 endpoint(std::size_t ray) const { return seed + offsets[ray]; }

  /// n * (k - 1) + 1: the seed is shared by every ray.
  std::size_t node_count() const { return ray_count() * static_cast<std::size_t>(k - 1) + 1; }

  /// Node id of layer `layer` (1-based) on ray r; layer 1 maps to the seed (id 0).
  std::size_t node_id(std::size_t ray, int layer) const {
    return layer <= 1 ? 0 : 1 + ray * static_cast<std::size_t>(k - 1) + static_cast<std::size_t>(layer - 2);
  }

  Vec3 node_pos(std::size_t ray, int layer) const {
    const double t = static_cast<double>(layer - 1) / static_cast<double>(k - 1);
    return seed + t * offsets[ray];
  }
};

/// Cube template centred on seed with the given outer edge length.
Template build_cube_template(Vec3 seed, double edge_mm, int m, int k);

/// Latitude/longitude sphere template: n_theta rings of n_phi rays plus two
/// pole rays. Poles are adjacent to every ray of their nearest ring.
Template build_sphere_template(Vec3 seed, double diameter_mm, int n_theta, int n_phi, int k);

}  // namespace cubecut
