#include "cubecut/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cubecut {

Volume::Volume(Dims dims, Vec3 spacing, Vec3 origin, std::vector<double> data)
    : dims_(dims), spacing_(spacing), origin_(origin), data_(std::move(data)) {
  if (!dims_.positive()) throw std::invalid_argument("volume dims must be positive");
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      throw std::invalid_argument("volume spacing must be positive and finite");
  }
  if (static_cast<std::int64_t>(data_.size()) != dims_.voxel_count())
    throw std::invalid_argument("data size mismatch");
}

bool Volume::contains(Vec3 p) const {
  const Vec3 c = continuous_index(p);
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(c[a] >= -0.5 && c[a] <= static_cast<double>(dims_[a]) - 0.5)) return false;
  }
  return true;
}

Index3 Volume::nearest_voxel(Vec3 p) const {
  const Vec3 c = continuous_index(p);
  auto snap = [](double v, std::int64_t n) {
    return std::clamp(static_cast<std::int64_t>(std::llround(v)), std::int64_t{0}, n - 1);
  };
  return {snap(c.x, dims_.nx), snap(c.y, dims_.ny), snap(c.z, dims_.nz)};
}

std::string Volume::bounds_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t a = 0; a < 3; ++a) {
    const double lo = origin_[a] - 0.5 * spacing_[a];
    const double hi = origin_[a] + (static_cast<double>(dims_[a]) - 0.5) * spacing_[a];
    os << (a ? ", " : "") << lo << ".." << hi;
  }
  os << "] mm";
  return os.str();
}

double Volume::min_value() const { return *std::min_element(data_.begin(), data_.end()); }
double Volume::max_value() const { return *std::max_element(data_.begin(), data_.end()); }

std::int64_t Mask::count() const {
  return std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; });
}

double sample_trilinear(const Volume& volume, Vec3 point) {
  const Dims& d = volume.dims();
  const Vec3 c = volume.continuous_index(point);

  std::int64_t lo[3];
  double frac[3];
  for (std::size_t a = 0; a < 3; ++a) {
    const double hi = static_cast<double>(d[a] - 1);
    const double v = std::clamp(c[a], 0.0, hi);
    std::int64_t base = static_cast<std::int64_t>(std::floor(v));
    if (base >= d[a] - 1) base = std::max<std::int64_t>(d[a] - 2, 0);
    lo[a] = base;
    frac[a] = d[a] > 1 ? v - static_cast<double>(base) : 0.0;
  }
  auto up = [&](std::size_t a) { return std::min(lo[a] + 1, d[a] - 1); };

  double result = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    const bool bx = corner & 1, by = corner & 2, bz = corner & 4;
    const double w = (bx ? frac[0] : 1.0 - frac[0]) * (by ? frac[1] : 1.0 - frac[1]) *
                     (bz ? frac[2] : 1.0 - frac[2]);
    if (w == 0.0) continue;
    result += w * volume.at(bx ? up(0) : lo[0], by ? up(1) : lo[1], bz ? up(2) : lo[2]);
  }
  return result;
}

Volume resample_isotropic(const Volume& volume, double target_spacing) {
  if (!(target_spacing > 0.0) || !std::isfinite(target_spacing))
    throw std::invalid_argument("target spacing must be positive");

  const Dims& d = volume.dims();
  std::int64_t n[3];
  for (std::size_t a = 0; a < 3; ++a) {
    const double extent = static_cast<double>(d[a]) * volume.spacing()[a];
    n[a] = std::max<std::int64_t>(1, std::llround(extent / target_spacing));
  }
  const Dims out_dims{n[0], n[1], n[2]};
  const Vec3 spacing{target_spacing, target_spacing, target_spacing};
  const Vec3 origin = volume.origin();

  std::vector<double> data(static_cast<std::size_t>(out_dims.voxel_count()));
  std::size_t idx = 0;
  for (std::int64_t k = 0; k < n[2]; ++k)
    for (std::int64_t j = 0; j < n[1]; ++j)
      for (std::int64_t i = 0; i < n[0]; ++i) {
        const Vec3 p{origin.x + static_cast<double>(i) * target_spacing,
                     origin.y + static_cast<double>(j) * target_spacing,
                     origin.z + static_cast<double>(k) * target_spacing};
        data[idx++] = sample_trilinear(volume, p);
      }
  return Volume(out_dims, spacing, origin, std::move(data));
}

SeedStats seed_stats(const Volume& volume, Vec3 seed, int halfwidth) {
  if (halfwidth < 0) throw std::invalid_argument("stats halfwidth must be >= 0");
  if (!volume.contains(seed)) throw SeedOutsideVolume("seed outside volume");

  const Dims& d = volume.dims();
  const Index3 c = volume.nearest_voxel(seed);
  const std::int64_t h = halfwidth;
  const std::int64_t i0 = std::max<std::int64_t>(0, c.i - h), i1 = std::min(d.nx - 1, c.i + h);
  const std::int64_t j0 = std::max<std::int64_t>(0, c.j - h), j1 = std::min(d.ny - 1, c.j + h);
  const std::int64_t k0 = std::max<std::int64_t>(0, c.k - h), k1 = std::min(d.nz - 1, c.k + h);

  SeedStats s;
  s.g_min = std::numeric_limits<double>::infinity();
  s.g_max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::int64_t k = k0; k <= k1; ++k)
    for (std::int64_t j = j0; j <= j1; ++j)
      for (std::int64_t i = i0; i <= i1; ++i) {
        const double g = volume.at(i, j, k);
        s.g_min = std::min(s.g_min, g);
        s.g_max = std::max(s.g_max, g);
        sum += g;
        ++s.sample_count;
      }
  s.g_avg = std::clamp(sum / static_cast<double>(s.sample_count), s.g_min, s.g_max);
  return s;
}

}  // namespace cubecut
