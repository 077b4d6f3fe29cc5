#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubecut/volume.hpp"

namespace cubecut {

/// Axial slices fix z (columns x, rows y); coronal fix y (columns x, rows z);
/// sagittal fix x (columns y, rows z).
enum class Plane { axial, coronal, sagittal };

std::optional<Plane> parse_plane(std::string_view name);
const char* plane_name(Plane plane);

/// Number of slices along the plane's fixed axis.
std::int64_t slice_count(const Dims& dims, Plane plane);

template <typename T>
struct Image2D {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<T> pixels;  // row-major

  T at(std::int64_t col, std::int64_t row) const {
    return pixels[static_cast<std::size_t>(row * width + col)];
  }
};

/// Throws std::out_of_range for an index outside the volume.
Image2D<double> extract_slice(const Volume& volume, Plane plane, std::int64_t index);
Image2D<std::uint8_t> extract_slice(const Mask& mask, Plane plane, std::int64_t index);

/// Linear windowing to 8 bits: lo -> 0, hi -> 255, clamped outside.
Image2D<std::uint8_t> apply_window(const Image2D<double>& slice, double lo, double hi);

/// 8-bit greyscale PNG.
std::string encode_png(const Image2D<std::uint8_t>& image);

using Polyline = std::vector<std::array<double, 2>>;

/// Marching-squares iso-contours of a binary image at level 0.5, in pixel
/// coordinates (pixel centres at integers). The image is treated as padded
/// by background so every contour closes; each polyline repeats its first
/// point at the end. Diagonal-only contacts keep object pixels separate.
std::vector<Polyline> trace_contours(const Image2D<std::uint8_t>& binary);

}  // namespace cubecut
