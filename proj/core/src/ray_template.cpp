#include "cubecut/ray_template.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cubecut {

std::int64_t SurfaceLattice::index_of(const LatticePoint& p) const {
  for (int c : p) {
    if (c < 0 || c >= m) return -1;
  }
  return lookup_[static_cast<std::size_t>((p[2] * m + p[1]) * m + p[0])];
}

SurfaceLattice cube_surface_lattice(int m) {
  if (m < 2) throw std::invalid_argument("lattice needs at least 2 points per edge");

  SurfaceLattice lat;
  lat.m = m;
  lat.lookup_.assign(static_cast<std::size_t>(m) * m * m, -1);
  auto on_surface = [m](int x, int y, int z) {
    return x == 0 || y == 0 || z == 0 || x == m - 1 || y == m - 1 || z == m - 1;
  };

  for (int z = 0; z < m; ++z)
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x) {
        if (!on_surface(x, y, z)) continue;
        lat.lookup_[static_cast<std::size_t>((z * m + y) * m + x)] =
            static_cast<std::int32_t>(lat.points.size());
        lat.points.push_back({x, y, z});
      }

  // Forward steps only, so every unordered pair is emitted once.
  for (std::uint32_t a = 0; a < lat.points.size(); ++a) {
    const auto& p = lat.points[a];
    for (int axis = 0; axis < 3; ++axis) {
      LatticePoint q = p;
      ++q[axis];
      const auto b = lat.index_of(q);
      if (b >= 0) lat.adjacency.emplace_back(a, static_cast<std::uint32_t>(b));
    }
  }
  return lat;
}

Template build_cube_template(Vec3 seed, double edge_mm, int m, int k) {
  if (!(edge_mm > 0.0) || !std::isfinite(edge_mm))
    throw std::invalid_argument("cube edge must be positive");
  if (k < 2) throw std::invalid_argument("need at least 2 nodes per ray");

  Template t;
  t.seed = seed;
  t.kind = TemplateKind::cube;
  t.k = k;
  t.scale = 0.5 * edge_mm;
  t.lattice = cube_surface_lattice(m);
  t.neighbors = t.lattice.adjacency;
  t.offsets.reserve(t.lattice.points.size());
  const double denom = static_cast<double>(m - 1);
  for (const auto& p : t.lattice.points) {
    const Vec3 unit{2.0 * p[0] / denom - 1.0, 2.0 * p[1] / denom - 1.0, 2.0 * p[2] / denom - 1.0};
    t.offsets.push_back(t.scale * unit);
  }
  return t;
}

Template build_sphere_template(Vec3 seed, double diameter_mm, int n_theta, int n_phi, int k) {
  if (!(diameter_mm > 0.0) || !std::isfinite(diameter_mm))
    throw std::invalid_argument("sphere diameter must be positive");
  if (n_theta < 2) throw std::invalid_argument("sphere template needs n_theta >= 2");
  if (n_phi < 3) throw std::invalid_argument("sphere template needs n_phi >= 3");
  if (k < 2) throw std::invalid_argument("need at least 2 nodes per ray");

  Template t;
  t.seed = seed;
  t.kind = TemplateKind::sphere;
  t.k = k;
  t.scale = 0.5 * diameter_mm;
  t.n_theta = n_theta;
  t.n_phi = n_phi;

  // Ray order: north pole, rings top to bottom (phi-minor), south pole.
  auto direction = [](double theta, double phi) {
    return Vec3{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  };
  t.offsets.push_back(t.scale * Vec3{0.0, 0.0, 1.0});
  for (int ring = 0; ring < n_theta; ++ring) {
    const double theta = std::numbers::pi * (ring + 1) / (n_theta + 1);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n_phi;
      t.offsets.push_back(t.scale * direction(theta, phi));
    }
  }
  t.offsets.push_back(t.scale * Vec3{0.0, 0.0, -1.0});

  const auto north = 0u;
  const auto south = static_cast<std::uint32_t>(t.offsets.size() - 1);
  auto ray = [n_phi](int ring, int j) {
    return static_cast<std::uint32_t>(1 + ring * n_phi + ((j % n_phi) + n_phi) % n_phi);
  };
  for (int j = 0; j < n_phi; ++j) t.neighbors.emplace_back(north, ray(0, j));
  for (int ring = 0; ring < n_theta; ++ring) {
    for (int j = 0; j < n_phi; ++j) {
      t.neighbors.emplace_back(ray(ring, j), ray(ring, j + 1));
      if (ring + 1 < n_theta) t.neighbors.emplace_back(ray(ring, j), ray(ring + 1, j));
    }
  }
  for (int j = 0; j < n_phi; ++j) t.neighbors.emplace_back(ray(n_theta - 1, j), south);
  return t;
}

}  // namespace cubecut
