#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cubecut/maxflow.hpp"
#include "cubecut/netbuild.hpp"
#include "cubecut/ray_template.hpp"
#include "cubecut/volume.hpp"

namespace cubecut {

enum class Label : std::uint8_t { sink = 0, source = 1 };

/// User-facing knobs. Defaults are the desk-scale phantom configuration.
struct Params {
  Vec3 seed{};
  TemplateKind kind = TemplateKind::cube;
  double edge_mm = 80.0;  // cube edge, or sphere diameter
  int m = 15;             // cube lattice points per edge
  int n_theta = 0;        // sphere rings; 0 derives m
  int n_phi = 0;          // sphere rays per ring; 0 derives 2m
  int k = 40;
  int delta = 2;
  int stats_halfwidth = 2;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

struct Segmentation {
  Template tmpl;
  SeedStats stats;
  std::vector<Label> labels;      // per template node id
  std::vector<int> boundaries;    // b_r per ray, 1-based layer
  Mask mask;
  TriangleMesh mesh;
  double cut_value = 0.0;         // max-flow value
  double energy = 0.0;            // energy of the induced labelling
  std::vector<std::string> warnings;
};

/// Fraction of rays cut at layer k-1 above which a small-cube warning is raised.
inline constexpr double kSmallCubeFraction = 0.05;

Template make_template(const Params& params);

/// Full pipeline: seed statistics, template, network, minimum cut, labels,
/// boundaries, mask and mesh. Throws SeedOutsideVolume when the seed misses
/// the volume.
Segmentation segment(const Volume& volume, const Params& params);

/// Sum of terminal penalties plus pairwise penalties for the labelling, which
/// is the capacity of the induced s-t cut. labels cover the non-terminal
/// nodes in increasing id order.
double energy(const FlowNetwork& net, std::span<const Label> labels);

/// Largest source-labelled layer on each ray. Throws std::logic_error if a
/// ray's labels are not a prefix of source labels.
std::vector<int> ray_boundaries(const Template& tmpl, std::span<const Label> labels);

/// Voxel-centre rasterisation of the segmented surface onto volume's grid.
Mask voxelize(const Template& tmpl, std::span<const int> boundaries, const Volume& volume);

/// Closed, outward-oriented mesh with one vertex per ray at its boundary node.
TriangleMesh triangulate(const Template& tmpl, std::span<const int> boundaries);

void write_stl(const TriangleMesh& mesh, std::ostream& os, const std::string& name = "cubecut");

}  // namespace cubecut
