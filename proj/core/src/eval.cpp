#include "cubecut/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cubecut {
namespace {

constexpr double kBoxTolerance = 1e-9;

Vec3 vec3_from_json(const nlohmann::json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw std::invalid_argument(std::string("phantom spec: '") + key + "' must be a 3-element array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

nlohmann::json vec3_to_json(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }

Box box_from_json(const nlohmann::json& j, Vec3 default_center) {
  Box b;
  b.center = j.contains("center_mm") ? vec3_from_json(j, "center_mm") : default_center;
  b.half_extent = vec3_from_json(j, "half_extent_mm");
  return b;
}

nlohmann::json box_to_json(const Box& b) {
  return {{"center_mm", vec3_to_json(b.center)}, {"half_extent_mm", vec3_to_json(b.half_extent)}};
}

Face face_from_string(const std::string& s) {
  if (s.size() != 2 || (s[0] != '+' && s[0] != '-') || s[1] < 'x' || s[1] > 'z')
    throw std::invalid_argument("phantom spec: face must be one of +x -x +y -y +z -z");
  return {s[1] - 'x', s[0] == '+' ? 1 : -1};
}

std::string face_to_string(Face f) {
  return std::string(1, f.sign > 0 ? '+' : '-') + static_cast<char>('x' + f.axis);
}

void validate(const PhantomSpec& spec) {
  if (!spec.dims.positive()) throw std::invalid_argument("phantom dims must be positive");
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(spec.spacing[a] > 0.0)) throw std::invalid_argument("phantom spacing must be positive");
    if (!(spec.box.half_extent[a] > 0.0))
      throw std::invalid_argument("phantom box half extents must be positive");
    const double lo = spec.origin[a] - 0.5 * spec.spacing[a];
    const double hi = spec.origin[a] + (static_cast<double>(spec.dims[a]) - 0.5) * spec.spacing[a];
    if (spec.box.center[a] - spec.box.half_extent[a] < lo - kBoxTolerance ||
        spec.box.center[a] + spec.box.half_extent[a] > hi + kBoxTolerance)
      throw std::invalid_argument("phantom box must lie inside the volume");
  }
  if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (spec.outliers && spec.outliers->count < 0)
    throw std::invalid_argument("outlier count must be >= 0");
  if (spec.gap) {
    if (spec.gap->face.axis < 0 || spec.gap->face.axis > 2)
      throw std::invalid_argument("gap face axis out of range");
    if (spec.gap->patch_half_mm < 0.0 || spec.gap->depth_mm < 0.0)
      throw std::invalid_argument("gap sizes must be >= 0");
  }
}

bool in_gap(const PhantomSpec& spec, Vec3 p) {
  const BoundaryGap& g = *spec.gap;
  const auto a = static_cast<std::size_t>(g.face.axis);
  const double past = g.face.sign * (p[a] - spec.box.center[a]) - spec.box.half_extent[a];
  if (past < -kBoxTolerance || past >= g.depth_mm - kBoxTolerance) return false;
  for (std::size_t t = 0; t < 3; ++t) {
    if (t == a) continue;
    if (std::fabs(p[t] - spec.box.center[t]) >= g.patch_half_mm - kBoxTolerance) return false;
  }
  return true;
}

}  // namespace

double dsc(const Mask& a, const Mask& b) {
  if (!(a.dims == b.dims) || a.data.size() != b.data.size())
    throw std::invalid_argument("dsc: mask dimensions differ");
  std::int64_t na = 0, nb = 0, both = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool x = a.data[i] != 0, y = b.data[i] != 0;
    na += x;
    nb += y;
    both += x && y;
  }
  if (na + nb == 0) throw std::invalid_argument("dsc: both masks are empty");
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

double mask_volume_mm3(const Mask& mask, Vec3 spacing) {
  if (!(spacing.x > 0.0 && spacing.y > 0.0 && spacing.z > 0.0))
    throw std::invalid_argument("spacing must be positive");
  return static_cast<double>(mask.count()) * spacing.x * spacing.y * spacing.z;
}

bool Box::contains(Vec3 p) const {
  for (std::size_t a = 0; a < 3; ++a) {
    const double lo = center[a] - half_extent[a], hi = center[a] + half_extent[a];
    if (p[a] < lo - kBoxTolerance || p[a] >= hi - kBoxTolerance) return false;
  }
  return true;
}

Vec3 PhantomSpec::volume_center() const {
  return {origin.x + 0.5 * static_cast<double>(dims.nx - 1) * spacing.x,
          origin.y + 0.5 * static_cast<double>(dims.ny - 1) * spacing.y,
          origin.z + 0.5 * static_cast<double>(dims.nz - 1) * spacing.z};
}

PhantomSpec default_box_phantom() {
  PhantomSpec spec;
  spec.box.center = spec.volume_center();
  spec.box.half_extent = {20.0, 20.0, 20.0};
  return spec;
}

double GaussianSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

std::uint64_t GaussianSource::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  return std::min(n - 1, static_cast<std::uint64_t>(uniform() * static_cast<double>(n)));
}

Phantom gen_phantom(const PhantomSpec& spec) {
  validate(spec);
  const Dims& d = spec.dims;
  std::vector<double> data(static_cast<std::size_t>(d.voxel_count()));
  Mask truth{d, spec.spacing, spec.origin, std::vector<std::uint8_t>(data.size(), 0)};

  auto world = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    return Vec3{spec.origin.x + static_cast<double>(i) * spec.spacing.x,
                spec.origin.y + static_cast<double>(j) * spec.spacing.y,
                spec.origin.z + static_cast<double>(k) * spec.spacing.z};
  };

  std::size_t idx = 0;
  for (std::int64_t k = 0; k < d.nz; ++k)
    for (std::int64_t j = 0; j < d.ny; ++j)
      for (std::int64_t i = 0; i < d.nx; ++i, ++idx) {
        const Vec3 p = world(i, j, k);
        const bool inside = spec.box.contains(p);
        truth.data[idx] = inside ? 1 : 0;
        data[idx] = inside || (spec.gap && in_gap(spec, p)) ? spec.object : spec.background;
      }

  GaussianSource rng(spec.rng_seed);
  if (spec.noise_sigma > 0.0) {
    for (double& g : data) g = std::max(0.0, g + spec.noise_sigma * rng.standard_normal());
  }

  if (spec.outliers && spec.outliers->count > 0) {
    std::vector<std::size_t> candidates;
    idx = 0;
    for (std::int64_t k = 0; k < d.nz; ++k)
      for (std::int64_t j = 0; j < d.ny; ++j)
        for (std::int64_t i = 0; i < d.nx; ++i, ++idx) {
          if (spec.outliers->region.contains(world(i, j, k))) candidates.push_back(idx);
        }
    if (candidates.size() < static_cast<std::size_t>(spec.outliers->count))
      throw std::invalid_argument("outlier region holds fewer voxels than the outlier count");
    std::set<std::size_t> used;
    while (used.size() < static_cast<std::size_t>(spec.outliers->count)) {
      const std::size_t pick = candidates[rng.below(candidates.size())];
      if (used.insert(pick).second) data[pick] = spec.outliers->grey;
    }
  }

  return {Volume(d, spec.spacing, spec.origin, std::move(data)), std::move(truth)};
}

PhantomSpec phantom_spec_from_json(const nlohmann::json& j) {
  PhantomSpec spec;
  try {
    if (j.contains("dims")) {
      const auto& a = j.at("dims");
      if (!a.is_array() || a.size() != 3)
        throw std::invalid_argument("phantom spec: 'dims' must be a 3-element array");
      spec.dims = {a[0].get<std::int64_t>(), a[1].get<std::int64_t>(), a[2].get<std::int64_t>()};
    }
    if (j.contains("spacing")) spec.spacing = vec3_from_json(j, "spacing");
    if (j.contains("origin")) spec.origin = vec3_from_json(j, "origin");
    spec.background = j.value("background", spec.background);
    spec.object = j.value("object", spec.object);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.rng_seed = j.value("rng_seed", spec.rng_seed);
    spec.box = box_from_json(j.at("box"), spec.volume_center());
    if (j.contains("outliers")) {
      const auto& o = j.at("outliers");
      Outliers out;
      out.count = o.at("count").get<int>();
      out.grey = o.at("grey").get<double>();
      out.region = o.contains("region") ? box_from_json(o.at("region"), spec.box.center) : spec.box;
      spec.outliers = out;
    }
    if (j.contains("gap")) {
      const auto& g = j.at("gap");
      BoundaryGap gap;
      gap.face = face_from_string(g.at("face").get<std::string>());
      gap.patch_half_mm = g.at("patch_half_mm").get<double>();
      gap.depth_mm = g.at("depth_mm").get<double>();
      spec.gap = gap;
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("phantom spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

nlohmann::json phantom_spec_to_json(const PhantomSpec& spec) {
  nlohmann::json j;
  j["dims"] = {spec.dims.nx, spec.dims.ny, spec.dims.nz};
  j["spacing"] = vec3_to_json(spec.spacing);
  j["origin"] = vec3_to_json(spec.origin);
  j["background"] = spec.background;
  j["object"] = spec.object;
  j["box"] = box_to_json(spec.box);
  j["noise_sigma"] = spec.noise_sigma;
  j["rng_seed"] = spec.rng_seed;
  if (spec.outliers) {
    j["outliers"] = {{"count", spec.outliers->count},
                     {"grey", spec.outliers->grey},
                     {"region", box_to_json(spec.outliers->region)}};
  }
  if (spec.gap) {
    j["gap"] = {{"face", face_to_string(spec.gap->face)},
                {"patch_half_mm", spec.gap->patch_half_mm},
                {"depth_mm", spec.gap->depth_mm}};
  }
  return j;
}

void write_report_csv(const std::vector<EvalRow>& rows, std::ostream& os) {
  const auto precision = os.precision();
  os << "case_id,manual_volume_mm3,automatic_volume_mm3,manual_voxels,automatic_voxels,dsc_percent\n";
  os.setf(std::ios::fixed);
  for (const EvalRow& r : rows) {
    os.precision(1);
    os << r.case_id << ',';
    if (r.manual_mm3) os << *r.manual_mm3;
    os << ',' << r.automatic_mm3 << ',';
    if (r.manual_voxels) os << *r.manual_voxels;
    os << ',' << r.automatic_voxels << ',';
    os.precision(2);
    if (r.dsc) os << 100.0 * *r.dsc;
    os << '\n';
  }
  os.unsetf(std::ios::fixed);
  os.precision(precision);
}

}  // namespace cubecut
