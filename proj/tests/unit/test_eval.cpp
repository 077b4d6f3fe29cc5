#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cubecut/eval.hpp"

using namespace cubecut;

namespace {

// Two masks on a line of voxels with |A| = a, |B| = b and |A n B| = both.
std::pair<Mask, Mask> overlapping(std::int64_t a, std::int64_t b, std::int64_t both) {
  const std::int64_t n = a + b - both;
  Mask ma{{n, 1, 1}, {1, 1, 1}, {}, std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)};
  Mask mb = ma;
  for (std::int64_t i = 0; i < a; ++i) ma.data[static_cast<std::size_t>(i)] = 1;
  for (std::int64_t i = a - both; i < n; ++i) mb.data[static_cast<std::size_t>(i)] = 1;
  return {ma, mb};
}

Mask count_mask(std::int64_t set, std::int64_t total) {
  Mask m{{total, 1, 1}, {1, 1, 1}, {}, std::vector<std::uint8_t>(static_cast<std::size_t>(total), 0)};
  for (std::int64_t i = 0; i < set; ++i) m.data[static_cast<std::size_t>(i)] = 1;
  return m;
}

std::set<double> distinct(std::span<const double> values) { return {values.begin(), values.end()}; }

}  // namespace

TEST_CASE("dsc examples") {
  const auto [a, b] = overlapping(2927, 3228, 2668);
  CHECK(a.count() == 2927);
  CHECK(b.count() == 3228);
  CHECK(dsc(a, b) == doctest::Approx(2.0 * 2668 / 6155));
  CHECK(std::abs(dsc(a, b) - 0.8669) <= 0.0002);
  CHECK(dsc(a, a) == 1.0);

  const auto [c, d] = overlapping(5, 7, 0);
  CHECK(dsc(c, d) == 0.0);
}

TEST_CASE("dsc errors") {
  Mask empty{{4, 1, 1}, {1, 1, 1}, {}, std::vector<std::uint8_t>(4, 0)};
  CHECK_THROWS_AS(dsc(empty, empty), std::invalid_argument);
  CHECK(dsc(empty, count_mask(2, 4)) == 0.0);
  CHECK_THROWS_AS(dsc(count_mask(1, 4), count_mask(1, 5)), std::invalid_argument);
}

TEST_CASE("dsc symmetry, identity and monotonicity") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    Mask a{{7, 6, 5}, {1, 1, 1}, {}, std::vector<std::uint8_t>(210)};
    Mask b = a;
    for (auto& v : a.data) v = static_cast<std::uint8_t>(rng() % 3 == 0);
    for (auto& v : b.data) v = static_cast<std::uint8_t>(rng() % 2 == 0);
    if (a.count() == 0) a.data[0] = 1;
    CHECK(dsc(a, b) == dsc(b, a));
    CHECK(dsc(a, a) == 1.0);
    CHECK(dsc(a, b) >= 0.0);
    CHECK(dsc(a, b) <= 1.0);
  }
  double previous = -1.0;
  for (std::int64_t both = 0; both <= 50; ++both) {
    const auto [a, b] = overlapping(50, 80, both);
    const double v = dsc(a, b);
    CHECK(v > previous);
    previous = v;
  }
}

TEST_CASE("mask_volume_mm3") {
  const Vec3 iso{2.01258, 2.01258, 2.01258};
  CHECK(std::abs(mask_volume_mm3(count_mask(2927, 2927), iso) / 23860.6 - 1.0) <= 5e-4);
  CHECK(std::abs(mask_volume_mm3(count_mask(3365, 3400), iso) / 27431.1 - 1.0) <= 5e-4);
  CHECK(mask_volume_mm3(count_mask(0, 10), iso) == 0.0);
  CHECK(mask_volume_mm3(count_mask(3, 10), {0.5, 2.0, 3.0}) == 9.0);
  CHECK_THROWS_AS(mask_volume_mm3(count_mask(3, 10), {0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("GaussianSource") {
  GaussianSource a(42), b(42);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = a.standard_normal();
    CHECK(x == b.standard_normal());
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);

  GaussianSource c(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(c.below(7) < 7);
  }
  CHECK_THROWS_AS(c.below(0), std::invalid_argument);
}

TEST_CASE("gen_phantom") {
  SUBCASE("noiseless phantom has two grey values") {
    PhantomSpec spec = default_box_phantom();
    spec.dims = {40, 40, 40};
    spec.box = {spec.volume_center(), {8, 8, 8}};
    const Phantom ph = gen_phantom(spec);
    CHECK(distinct(ph.volume.data()) == std::set<double>{10.0, 100.0});
    CHECK(ph.truth.count() == 16 * 16 * 16);
  }
  SUBCASE("default desk-scale phantom has 64000 truth voxels") {
    const Phantom ph = gen_phantom(default_box_phantom());
    CHECK(ph.truth.count() == 64000);
    CHECK(ph.volume.dims() == Dims{160, 160, 160});
  }
  SUBCASE("box centred on a voxel centre also gives a whole number of voxels") {
    PhantomSpec spec = default_box_phantom();
    spec.box.center = {80, 80, 80};
    CHECK(gen_phantom(spec).truth.count() == 64000);
  }
  SUBCASE("determinism and noise independence of the truth") {
    PhantomSpec spec = default_box_phantom();
    spec.dims = {32, 32, 32};
    spec.box = {spec.volume_center(), {6, 6, 6}};
    spec.noise_sigma = 5.0;
    spec.rng_seed = 7;
    spec.outliers = Outliers{5, 255.0, spec.box};
    const Phantom a = gen_phantom(spec);
    const Phantom b = gen_phantom(spec);
    CHECK(std::equal(a.volume.data().begin(), a.volume.data().end(), b.volume.data().begin()));
    CHECK(a.truth == b.truth);

    spec.rng_seed = 8;
    const Phantom c = gen_phantom(spec);
    CHECK_FALSE(std::equal(a.volume.data().begin(), a.volume.data().end(), c.volume.data().begin()));

    for (double sigma : {0.0, 1.0, 20.0}) {
      spec.noise_sigma = sigma;
      CHECK(gen_phantom(spec).truth == a.truth);
    }
    CHECK(std::count(a.volume.data().begin(), a.volume.data().end(), 255.0) == 5);
    CHECK(*std::min_element(a.volume.data().begin(), a.volume.data().end()) >= 0.0);
  }
  SUBCASE("boundary gap continues object grey past the face") {
    PhantomSpec spec = default_box_phantom();
    spec.dims = {32, 32, 32};
    spec.box = {spec.volume_center(), {6, 6, 6}};
    spec.gap = BoundaryGap{{0, 1}, 2.0, 3.0};
    const Phantom ph = gen_phantom(spec);
    const auto c = spec.volume_center();
    const Index3 just_outside = ph.volume.nearest_voxel({c.x + 6.5, c.y + 0.5, c.z + 0.5});
    CHECK(ph.volume.at(just_outside.i, just_outside.j, just_outside.k) == 100.0);
    CHECK(ph.truth.at(just_outside.i, just_outside.j, just_outside.k) == 0);
    const Index3 far = ph.volume.nearest_voxel({c.x + 12.5, c.y + 0.5, c.z + 0.5});
    CHECK(ph.volume.at(far.i, far.j, far.k) == 10.0);
  }
  SUBCASE("invalid specs") {
    PhantomSpec spec = default_box_phantom();
    spec.noise_sigma = -1.0;
    CHECK_THROWS_AS(gen_phantom(spec), std::invalid_argument);
    spec = default_box_phantom();
    spec.box.center = {0, 0, 0};
    CHECK_THROWS_AS(gen_phantom(spec), std::invalid_argument);
    spec = default_box_phantom();
    spec.outliers = Outliers{10, 1.0, Box{{0, 0, 0}, {0.6, 0.6, 0.6}}};
    CHECK_THROWS_AS(gen_phantom(spec), std::invalid_argument);
  }
}

TEST_CASE("phantom spec JSON") {
  const auto j = nlohmann::json::parse(R"({
    "dims": [64, 64, 64],
    "spacing": [1, 1, 1],
    "background": 10,
    "object": 100,
    "box": {"half_extent_mm": [10, 10, 10]},
    "noise_sigma": 5,
    "rng_seed": 7,
    "outliers": {"count": 5, "grey": 255},
    "gap": {"face": "-y", "patch_half_mm": 3, "depth_mm": 2}
  })");
  const PhantomSpec spec = phantom_spec_from_json(j);
  CHECK(spec.dims == Dims{64, 64, 64});
  CHECK(spec.box.center == Vec3{31.5, 31.5, 31.5});
  REQUIRE(spec.outliers);
  CHECK(spec.outliers->region.center == spec.box.center);
  REQUIRE(spec.gap);
  CHECK(spec.gap->face.axis == 1);
  CHECK(spec.gap->face.sign == -1);

  const PhantomSpec back = phantom_spec_from_json(phantom_spec_to_json(spec));
  CHECK(phantom_spec_to_json(back) == phantom_spec_to_json(spec));
  const Phantom a = gen_phantom(spec), b = gen_phantom(back);
  CHECK(std::equal(a.volume.data().begin(), a.volume.data().end(), b.volume.data().begin()));

  CHECK_THROWS_AS(phantom_spec_from_json(nlohmann::json::parse(R"({"dims": [1, 2]})")), std::invalid_argument);
  CHECK_THROWS_AS(phantom_spec_from_json(nlohmann::json::parse(R"({"box": {}})")), std::invalid_argument);
  CHECK_THROWS_AS(
      phantom_spec_from_json(nlohmann::json::parse(
          R"({"box": {"half_extent_mm": [1, 1, 1]}, "gap": {"face": "up", "patch_half_mm": 1, "depth_mm": 1}})")),
      std::invalid_argument);
}

TEST_CASE("report CSV") {
  std::ostringstream os;
  EvalRow full{"case1", 23860.6, 26314.3, 2927, 3228, 0.8669};
  EvalRow bare{"case2", std::nullopt, 12.5, std::nullopt, 3, std::nullopt};
  write_report_csv({full, bare}, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "case_id,manual_volume_mm3,automatic_volume_mm3,manual_voxels,automatic_voxels,dsc_percent");
  std::getline(is, line);
  CHECK(line.rfind("case1,23860.6,26314.3,2927,3228,86.69", 0) == 0);
  std::getline(is, line);
  CHECK(line.rfind("case2,,12.5,,3,", 0) == 0);
}
