#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cubecut/volume.hpp"

namespace cubecut {

/// Dice similarity 2|A n B| / (|A| + |B|). Throws when dims differ or both
/// masks are empty.
double dsc(const Mask& a, const Mask& b);

/// Set-voxel count times the voxel volume.
double mask_volume_mm3(const Mask& mask, Vec3 spacing);

struct Box {
  Vec3 center{};
  Vec3 half_extent{};

  /// Half-open test lo <= p < hi per axis, so a box whose edges fall between
  /// voxel centres contains a whole number of voxels.
  bool contains(Vec3 p) const;
};

/// Face of a box, as axis (0..2) and sign (+1 / -1).
struct Face {
  int axis = 0;
  int sign = 1;
};

/// Object grey leaking through a patch of one box face, modelling a
/// homogeneous object/background transition.
struct BoundaryGap {
  Face face{};
  double patch_half_mm = 0.0;  // half size of the square patch on the face
  double depth_mm = 0.0;       // how far past the face the object grey continues
};

struct Outliers {
  int count = 0;
  double grey = 0.0;
  Box region{};  // voxels drawn uniformly among centres inside this box
};

/// Synthetic box phantom with known ground truth.
struct PhantomSpec {
  Dims dims{160, 160, 160};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{};
  double background = 10.0;
  double object = 100.0;
  Box box{};
  double noise_sigma = 0.0;
  std::optional<Outliers> outliers;
  std::optional<BoundaryGap> gap;
  std::uint64_t rng_seed = 0;

  /// Volume centre in world coordinates (voxel-centre convention).
  Vec3 volume_center() const;
};

/// Desk-scale phantom: 40 mm box centred in a 160^3 volume at 1 mm,
/// contrast 90, no noise.
PhantomSpec default_box_phantom();

/// Standard-normal draws via Box-Muller over mt19937_64. Both values of each
/// pair are used, cosine branch first. Uniforms are (bits >> 11) * 2^-53.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double uniform();       // [0, 1)
  double standard_normal();
  std::uint64_t below(std::uint64_t n);  // uniform integer in [0, n)

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct Phantom {
  Volume volume;
  Mask truth;
};

/// Deterministic for a given spec: geometry (with gap), then Gaussian noise
/// over all voxels in x-fastest order, then outliers.
Phantom gen_phantom(const PhantomSpec& spec);

PhantomSpec phantom_spec_from_json(const nlohmann::json& j);
nlohmann::json phantom_spec_to_json(const PhantomSpec& spec);

/// One row of an evaluation report.
struct EvalRow {
  std::string case_id;
  std::optional<double> manual_mm3;
  double automatic_mm3 = 0.0;
  std::optional<std::int64_t> manual_voxels;
  std::int64_t automatic_voxels = 0;
  std::optional<double> dsc;
};

void write_report_csv(const std::vector<EvalRow>& rows, std::ostream& os);

}  // namespace cubecut
