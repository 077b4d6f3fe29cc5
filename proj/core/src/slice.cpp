#include "cubecut/slice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <png.h>

namespace cubecut {

std::optional<Plane> parse_plane(std::string_view name) {
  if (name == "axial") return Plane::axial;
  if (name == "coronal") return Plane::coronal;
  if (name == "sagittal") return Plane::sagittal;
  return std::nullopt;
}

const char* plane_name(Plane plane) {
  switch (plane) {
    case Plane::axial: return "axial";
    case Plane::coronal: return "coronal";
    case Plane::sagittal: return "sagittal";
  }
  return "";
}

std::int64_t slice_count(const Dims& dims, Plane plane) {
  switch (plane) {
    case Plane::axial: return dims.nz;
    case Plane::coronal: return dims.ny;
    case Plane::sagittal: return dims.nx;
  }
  return 0;
}

namespace {

template <typename T, typename Get>
Image2D<T> extract(const Dims& d, Plane plane, std::int64_t index, Get get) {
  if (index < 0 || index >= slice_count(d, plane)) throw std::out_of_range("slice index out of range");
  Image2D<T> img;
  switch (plane) {
    case Plane::axial: img.width = d.nx, img.height = d.ny; break;
    case Plane::coronal: img.width = d.nx, img.height = d.nz; break;
    case Plane::sagittal: img.width = d.ny, img.height = d.nz; break;
  }
  img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
  for (std::int64_t row = 0; row < img.height; ++row)
    for (std::int64_t col = 0; col < img.width; ++col) {
      T v{};
      switch (plane) {
        case Plane::axial: v = get(col, row, index); break;
        case Plane::coronal: v = get(col, index, row); break;
        case Plane::sagittal: v = get(index, col, row); break;
      }
      img.pixels[static_cast<std::size_t>(row * img.width + col)] = v;
    }
  return img;
}

}  // namespace

Image2D<double> extract_slice(const Volume& volume, Plane plane, std::int64_t index) {
  return extract<double>(volume.dims(), plane, index,
                         [&](std::int64_t i, std::int64_t j, std::int64_t k) { return volume.at(i, j, k); });
}

Image2D<std::uint8_t> extract_slice(const Mask& mask, Plane plane, std::int64_t index) {
  return extract<std::uint8_t>(mask.dims, plane, index,
                               [&](std::int64_t i, std::int64_t j, std::int64_t k) {
                                 return static_cast<std::uint8_t>(mask.at(i, j, k) ? 1 : 0);
                               });
}

Image2D<std::uint8_t> apply_window(const Image2D<double>& slice, double lo, double hi) {
  Image2D<std::uint8_t> out{slice.width, slice.height, std::vector<std::uint8_t>(slice.pixels.size())};
  const double span = hi - lo;
  for (std::size_t i = 0; i < slice.pixels.size(); ++i) {
    double t = span > 0.0 ? (slice.pixels[i] - lo) / span : (slice.pixels[i] >= hi ? 1.0 : 0.0);
    t = std::clamp(t, 0.0, 1.0);
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * t));
  }
  return out;
}

std::string encode_png(const Image2D<std::uint8_t>& image) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png: cannot create info struct");
  }

  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t length) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), length);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::int64_t row = 0; row < image.height; ++row) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + row * image.width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::vector<Polyline> trace_contours(const Image2D<std::uint8_t>& binary) {
  const std::int64_t w = binary.width, h = binary.height;
  auto value = [&](std::int64_t x, std::int64_t y) -> int {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0;
    return binary.at(x, y) ? 1 : 0;
  };

  // Edge midpoints in doubled coordinates, packed into one key.
  const std::int64_t stride = 2 * h + 8;
  auto key = [&](std::int64_t x2, std::int64_t y2) { return (x2 + 4) * stride + (y2 + 4); };
  auto point = [&](std::int64_t k) {
    return std::array<double, 2>{0.5 * static_cast<double>(k / stride - 4),
                                 0.5 * static_cast<double>(k % stride - 4)};
  };

  std::vector<std::array<std::int64_t, 2>> segments;
  for (std::int64_t cy = -1; cy < h; ++cy) {
    for (std::int64_t cx = -1; cx < w; ++cx) {
      const int tl = value(cx, cy), tr = value(cx + 1, cy);
      const int br = value(cx + 1, cy + 1), bl = value(cx, cy + 1);
      const int code = tl | (tr << 1) | (br << 2) | (bl << 3);
      if (code == 0 || code == 15) continue;
      const std::int64_t top = key(2 * cx + 1, 2 * cy), bottom = key(2 * cx + 1, 2 * cy + 2);
      const std::int64_t left = key(2 * cx, 2 * cy + 1), right = key(2 * cx + 2, 2 * cy + 1);
      if (code == 5) {  // tl, br object: isolate each corner
        segments.push_back({left, top});
        segments.push_back({right, bottom});
        continue;
      }
      if (code == 10) {  // tr, bl object
        segments.push_back({top, right});
        segments.push_back({bottom, left});
        continue;
      }
      std::vector<std::int64_t> crossed;
      if (tl != tr) crossed.push_back(top);
      if (tr != br) crossed.push_back(right);
      if (br != bl) crossed.push_back(bottom);
      if (bl != tl) crossed.push_back(left);
      segments.push_back({crossed[0], crossed[1]});
    }
  }

  std::unordered_map<std::int64_t, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s][0]].push_back(s);
    incident[segments[s][1]].push_back(s);
  }

  std::vector<std::uint8_t> used(segments.size(), 0);
  std::vector<Polyline> contours;
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    used[start] = 1;
    Polyline line{point(segments[start][0])};
    const std::int64_t origin = segments[start][0];
    std::int64_t cursor = segments[start][1];
    while (cursor != origin) {
      line.push_back(point(cursor));
      std::size_t next = segments.size();
      for (const std::size_t s : incident[cursor]) {
        if (!used[s]) {
          next = s;
          break;
        }
      }
      if (next == segments.size()) break;
      used[next] = 1;
      cursor = segments[next][0] == cursor ? segments[next][1] : segments[next][0];
    }
    line.push_back(line.front());
    contours.push_back(std::move(line));
  }
  return contours;
}

}  // namespace cubecut
