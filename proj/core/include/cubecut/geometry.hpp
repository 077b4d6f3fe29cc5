#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace cubecut {

/// Point or direction in world coordinates (millimetres).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t axis) const {
    return axis == 0 ? x : (axis == 1 ? y : z);
  }
  constexpr double& operator[](std::size_t axis) {
    return axis == 0 ? x : (axis == 1 ? y : z);
  }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr Vec3 operator*(Vec3 v, double s) { return s * v; }
  friend constexpr bool operator==(Vec3 a, Vec3 b) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

inline double max_norm(Vec3 v) {
  return std::fmax(std::fabs(v.x), std::fmax(std::fabs(v.y), std::fabs(v.z)));
}

/// Grid extents in voxels along x, y, z.
struct Dims {
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::int64_t nz = 0;

  constexpr std::int64_t operator[](std::size_t axis) const {
    return axis == 0 ? nx : (axis == 1 ? ny : nz);
  }
  constexpr std::int64_t voxel_count() const { return nx * ny * nz; }
  constexpr bool positive() const { return nx > 0 && ny > 0 && nz > 0; }
  friend constexpr bool operator==(Dims, Dims) = default;
};

/// Integer voxel index.
struct Index3 {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;
  friend constexpr bool operator==(Index3, Index3) = default;
};

/// Linear offset of a voxel in x-fastest, z-slowest order.
constexpr std::size_t linear_index(const Dims& d, std::int64_t i, std::int64_t j, std::int64_t k) {
  return static_cast<std::size_t>((k * d.ny + j) * d.nx + i);
}

}  // namespace cubecut
