#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubecut/geometry.hpp"

namespace cubecut {

/// Raised when a seed point does not fall inside the volume's voxel footprint.
class SeedOutsideVolume : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Axis-aligned scalar grid. World position of voxel (i,j,k) is
/// origin + (i*sx, j*sy, k*sz); values are stored x-fastest.
///
/// Immutable after construction, so concurrent reads are safe.
class Volume {
 public:
  Volume() = default;
  Volume(Dims dims, Vec3 spacing, Vec3 origin, std::vector<double> data);

  const Dims& dims() const { return dims_; }
  const Vec3& spacing() const { return spacing_; }
  const Vec3& origin() const { return origin_; }
  std::span<const double> data() const { return data_; }

  double at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return data_[linear_index(dims_, i, j, k)];
  }

  Vec3 world(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return {origin_.x + static_cast<double>(i) * spacing_.x,
            origin_.y + static_cast<double>(j) * spacing_.y,
            origin_.z + static_cast<double>(k) * spacing_.z};
  }

  /// Continuous voxel coordinates of a world point.
  Vec3 continuous_index(Vec3 p) const {
    return {(p.x - origin_.x) / spacing_.x, (p.y - origin_.y) / spacing_.y,
            (p.z - origin_.z) / spacing_.z};
  }

  /// True when p lies within the union of voxel footprints
  /// (each voxel extends half a spacing around its centre).
  bool contains(Vec3 p) const;

  /// Voxel whose centre is nearest to p, clamped into the grid.
  Index3 nearest_voxel(Vec3 p) const;

  /// Human-readable world-space bounds, used in diagnostics.
  std::string bounds_string() const;

  double min_value() const;
  double max_value() const;

 private:
  Dims dims_{};
  Vec3 spacing_{1.0, 1.0, 1.0};
  Vec3 origin_{};
  std::vector<double> data_;
};

/// Binary grid sharing a volume's geometry; values are exactly 0 or 1.
struct Mask {
  Dims dims{};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{};
  std::vector<std::uint8_t> data;

  static Mask like(const Volume& v) {
    Mask m{v.dims(), v.spacing(), v.origin(), {}};
    m.data.assign(static_cast<std::size_t>(v.dims().voxel_count()), 0);
    return m;
  }

  std::uint8_t at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return data[linear_index(dims, i, j, k)];
  }
  std::uint8_t& at(std::int64_t i, std::int64_t j, std::int64_t k) {
    return data[linear_index(dims, i, j, k)];
  }

  std::int64_t count() const;

  friend bool operator==(const Mask&, const Mask&) = default;
};

/// Grey-value interval and mean of the block around the seed.
struct SeedStats {
  double g_min = 0.0;
  double g_max = 0.0;
  double g_avg = 0.0;
  std::int64_t sample_count = 0;

  bool contains(double g) const { return g >= g_min && g <= g_max; }
};

/// Trilinear interpolation between the eight surrounding voxel centres.
/// Points outside the voxel-centre bounding box are clamped onto it first.
double sample_trilinear(const Volume& volume, Vec3 point);

/// Resamples onto an isotropic grid with the same origin. Each axis gets
/// round(extent / target_spacing) voxels (at least one), where extent is
/// dims * spacing.
Volume resample_isotropic(const Volume& volume, double target_spacing);

/// Min, max and mean over the (2h+1)^3 voxel block centred on the voxel
/// nearest the seed. The block is clipped at the volume border.
SeedStats seed_stats(const Volume& volume, Vec3 seed, int halfwidth);

}  // namespace cubecut
