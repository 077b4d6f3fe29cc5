#include "cubecut/segment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cubecut {
namespace {

constexpr double kLayerTolerance = 1e-9;
// A boundary node owns the half layer beyond it: voxels up to the midpoint
// towards the first outside node are counted as inside.
constexpr double kBoundaryHalfLayer = 0.5;

std::string seed_message(const Volume& volume, Vec3 seed) {
  std::ostringstream os;
  os << "seed (" << seed.x << ", " << seed.y << ", " << seed.z << ") mm outside volume bounds "
     << volume.bounds_string();
  return os.str();
}

// Dominant axis of d; ties resolve x before y before z.
std::size_t dominant_axis(Vec3 d) {
  const double ax = std::fabs(d.x), ay = std::fabs(d.y), az = std::fabs(d.z);
  if (ax >= ay && ax >= az) return 0;
  if (ay >= az) return 1;
  return 2;
}

// Voxel index range whose centres fall within [lo, hi] along one axis.
std::pair<std::int64_t, std::int64_t> index_span(const Volume& v, std::size_t axis, double lo,
                                                 double hi) {
  const double o = v.origin()[axis], s = v.spacing()[axis];
  const auto first = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((lo - o) / s - 1e-9)));
  const auto last = std::min<std::int64_t>(v.dims()[axis] - 1,
                                           static_cast<std::int64_t>(std::floor((hi - o) / s + 1e-9)));
  return {first, last};
}

double cube_boundary_at(const Template& tmpl, std::span<const int> boundaries, Vec3 d) {
  const SurfaceLattice& lat = tmpl.lattice;
  const int m = lat.m;
  const std::size_t a = dominant_axis(d);
  const double lead = std::fabs(d[a]);

  std::array<std::size_t, 2> tangent{};
  for (std::size_t axis = 0, n = 0; axis < 3; ++axis) {
    if (axis != a) tangent[n++] = axis;
  }

  LatticePoint base{};
  base[a] = d[a] > 0.0 ? m - 1 : 0;
  std::array<int, 2> lo{};
  std::array<double, 2> frac{};
  for (std::size_t t = 0; t < 2; ++t) {
    const double u = std::clamp(d[tangent[t]] / lead, -1.0, 1.0);
    const double p = 0.5 * (u + 1.0) * (m - 1);
    const int cell = std::clamp(static_cast<int>(std::floor(p)), 0, m - 2);
    lo[t] = cell;
    frac[t] = p - cell;
  }

  double b = 0.0;
  for (int corner = 0; corner < 4; ++corner) {
    const int du = corner & 1, dv = (corner >> 1) & 1;
    const double w = (du ? frac[0] : 1.0 - frac[0]) * (dv ? frac[1] : 1.0 - frac[1]);
    if (w == 0.0) continue;
    LatticePoint p = base;
    p[tangent[0]] = lo[0] + du;
    p[tangent[1]] = lo[1] + dv;
    const auto ray = lat.index_of(p);
    if (ray < 0) throw std::logic_error("voxelize: lattice lookup left the cube surface");
    b += w * boundaries[static_cast<std::size_t>(ray)];
  }
  return b;
}

void triangulate_cube(const Template& tmpl, TriangleMesh& mesh) {
  const SurfaceLattice& lat = tmpl.lattice;
  const int m = lat.m;
  auto vid = [&](const LatticePoint& p) { return static_cast<std::uint32_t>(lat.index_of(p)); };

  for (int a = 0; a < 3; ++a) {
    // (b, c) cyclic after a, so e_b x e_c = e_a.
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    for (const int side : {0, m - 1}) {
      for (int v = 0; v + 1 < m; ++v) {
        for (int u = 0; u + 1 < m; ++u) {
          LatticePoint p00{}, p10{}, p11{}, p01{};
          p00[a] = p10[a] = p11[a] = p01[a] = side;
          p00[b] = u, p00[c] = v;
          p10[b] = u + 1, p10[c] = v;
          p11[b] = u + 1, p11[c] = v + 1;
          p01[b] = u, p01[c] = v + 1;
          const auto i00 = vid(p00), i10 = vid(p10), i11 = vid(p11), i01 = vid(p01);
          if (side == m - 1) {
            mesh.triangles.push_back({i00, i10, i11});
            mesh.triangles.push_back({i00, i11, i01});
          } else {
            mesh.triangles.push_back({i00, i11, i10});
            mesh.triangles.push_back({i00, i01, i11});
          }
        }
      }
    }
  }
}

void triangulate_sphere(const Template& tmpl, TriangleMesh& mesh) {
  const int rings = tmpl.n_theta, per_ring = tmpl.n_phi;
  const auto north = 0u;
  const auto south = static_cast<std::uint32_t>(tmpl.ray_count() - 1);
  auto ray = [per_ring](int ring, int j) {
    return static_cast<std::uint32_t>(1 + ring * per_ring + (j % per_ring));
  };
  for (int j = 0; j < per_ring; ++j) mesh.triangles.push_back({north, ray(0, j), ray(0, j + 1)});
  for (int ring = 0; ring + 1 < rings; ++ring) {
    for (int j = 0; j < per_ring; ++j) {
      const auto a = ray(ring, j), b = ray(ring + 1, j), c = ray(ring + 1, j + 1), d = ray(ring, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  for (int j = 0; j < per_ring; ++j)
    mesh.triangles.push_back({south, ray(rings - 1, j + 1), ray(rings - 1, j)});
}

}  // namespace

Template make_template(const Params& p) {
  if (p.kind == TemplateKind::cube) return build_cube_template(p.seed, p.edge_mm, p.m, p.k);
  const int n_theta = p.n_theta > 0 ? p.n_theta : p.m;
  const int n_phi = p.n_phi > 0 ? p.n_phi : 2 * p.m;
  return build_sphere_template(p.seed, p.edge_mm, n_theta, n_phi, p.k);
}

Segmentation segment(const Volume& volume, const Params& params) {
  if (!volume.contains(params.seed)) throw SeedOutsideVolume(seed_message(volume, params.seed));
  if (params.delta < 0) throw std::invalid_argument("smoothness delta must be >= 0");

  Segmentation seg;
  seg.stats = seed_stats(volume, params.seed, params.stats_halfwidth);
  seg.tmpl = make_template(params);

  const FlowNetwork net = build_network(seg.tmpl, volume, seg.stats, params.delta);
  const FlowState flow = bk_maxflow(net);
  const auto side = min_cut_partition(net, flow);

  seg.labels.resize(seg.tmpl.node_count());
  for (std::size_t v = 0; v < seg.labels.size(); ++v)
    seg.labels[v] = side[v] ? Label::source : Label::sink;

  seg.boundaries = ray_boundaries(seg.tmpl, seg.labels);
  seg.cut_value = flow.flow_value;
  seg.energy = energy(net, seg.labels);
  seg.mask = voxelize(seg.tmpl, seg.boundaries, volume);
  seg.mesh = triangulate(seg.tmpl, seg.boundaries);

  const auto at_limit = std::count(seg.boundaries.begin(), seg.boundaries.end(), seg.tmpl.k - 1);
  const double fraction = static_cast<double>(at_limit) / static_cast<double>(seg.boundaries.size());
  if (fraction > kSmallCubeFraction) {
    std::ostringstream os;
    os.precision(3);
    os << "template likely smaller than the target: " << 100.0 * fraction
       << "% of rays cut at the last interior layer; consider a larger edge";
    seg.warnings.push_back(os.str());
  }
  return seg;
}

double energy(const FlowNetwork& net, std::span<const Label> labels) {
  if (labels.size() + 2 != net.node_count)
    throw std::invalid_argument("labelling must cover every non-terminal node");

  // Source side membership for every node id.
  std::vector<std::uint8_t> source_side(net.node_count, 0);
  std::size_t next = 0;
  for (std::uint32_t v = 0; v < net.node_count; ++v) {
    if (v == net.source) {
      source_side[v] = 1;
    } else if (v != net.sink) {
      source_side[v] = labels[next++] == Label::source;
    }
  }
  return cut_capacity(net, source_side);
}

std::vector<int> ray_boundaries(const Template& tmpl, std::span<const Label> labels) {
  if (labels.size() != tmpl.node_count())
    throw std::invalid_argument("label count does not match template");
  std::vector<int> out(tmpl.ray_count(), 1);
  for (std::size_t r = 0; r < tmpl.ray_count(); ++r) {
    int b = 1;
    for (int i = 2; i <= tmpl.k; ++i) {
      if (labels[tmpl.node_id(r, i)] == Label::source) {
        if (b != i - 1) throw std::logic_error("labels along a ray are not a source prefix");
        b = i;
      }
    }
    out[r] = b;
  }
  return out;
}

Mask voxelize(const Template& tmpl, std::span<const int> boundaries, const Volume& volume) {
  if (boundaries.size() != tmpl.ray_count())
    throw std::invalid_argument("boundary count does not match template");

  Mask mask = Mask::like(volume);
  const double scale = tmpl.scale;
  const double layers = static_cast<double>(tmpl.k - 1);
  const auto [i0, i1] = index_span(volume, 0, tmpl.seed.x - scale, tmpl.seed.x + scale);
  const auto [j0, j1] = index_span(volume, 1, tmpl.seed.y - scale, tmpl.seed.y + scale);
  const auto [k0, k1] = index_span(volume, 2, tmpl.seed.z - scale, tmpl.seed.z + scale);

  std::vector<Vec3> directions;
  if (tmpl.kind == TemplateKind::sphere) {
    directions.reserve(tmpl.ray_count());
    for (const Vec3& o : tmpl.offsets) directions.push_back((1.0 / norm(o)) * o);
  }

  for (std::int64_t k = k0; k <= k1; ++k)
    for (std::int64_t j = j0; j <= j1; ++j)
      for (std::int64_t i = i0; i <= i1; ++i) {
        const Vec3 d = volume.world(i, j, k) - tmpl.seed;
        bool inside = false;
        if (tmpl.kind == TemplateKind::cube) {
          const double s = max_norm(d) / scale;
          if (s > 1.0) continue;
          if (s == 0.0) {
            inside = true;
          } else {
            const double layer = 1.0 + s * layers;
            inside = layer <= cube_boundary_at(tmpl, boundaries, d) + kBoundaryHalfLayer + kLayerTolerance;
          }
        } else {
          const double len = norm(d);
          const double s = len / scale;
          if (s > 1.0) continue;
          if (len == 0.0) {
            inside = true;
          } else {
            std::size_t best = 0;
            double best_dot = -2.0;
            for (std::size_t r = 0; r < directions.size(); ++r) {
              const double c = dot(directions[r], d);
              if (c > best_dot) best_dot = c, best = r;
            }
            inside = 1.0 + s * layers <= boundaries[best] + kBoundaryHalfLayer + kLayerTolerance;
          }
        }
        if (inside) mask.at(i, j, k) = 1;
      }
  return mask;
}

TriangleMesh triangulate(const Template& tmpl, std::span<const int> boundaries) {
  if (boundaries.size() != tmpl.ray_count())
    throw std::invalid_argument("boundary count does not match template");
  TriangleMesh mesh;
  mesh.vertices.reserve(tmpl.ray_count());
  for (std::size_t r = 0; r < tmpl.ray_count(); ++r)
    mesh.vertices.push_back(tmpl.node_pos(r, boundaries[r]));
  if (tmpl.kind == TemplateKind::cube) {
    triangulate_cube(tmpl, mesh);
  } else {
    triangulate_sphere(tmpl, mesh);
  }
  return mesh;
}

void write_stl(const TriangleMesh& mesh, std::ostream& os, const std::string& name) {
  const auto precision = os.precision(9);
  os << "solid " << name << '\n';
  for (const auto& tri : mesh.triangles) {
    const Vec3 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (len > 0.0) n = (1.0 / len) * n;
    os << "  facet normal " << n.x << ' ' << n.y << ' ' << n.z << "\n    outer loop\n";
    for (const Vec3& p : {a, b, c}) os << "      vertex " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    os << "    endloop\n  endfacet\n";
  }
  os << "endsolid " << name << '\n';
  os.precision(precision);
}

}  // namespace cubecut
