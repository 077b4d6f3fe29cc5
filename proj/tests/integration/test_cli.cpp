#include <doctest.h>

#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "cubecut/mhd.hpp"
#include "temp_dir.hpp"

using cubecut::testing::TempDir;
namespace cli = cubecut::cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cubecut");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string spec_json() {
  return R"({"dims": [48, 48, 48], "box": {"half_extent_mm": [10, 10, 10]},
             "noise_sigma": 5, "rng_seed": 3, "outliers": {"count": 3, "grey": 250}})";
}

void make_phantom(const TempDir& dir) {
  std::ofstream(dir / "spec.json") << spec_json();
  const Run r = run({"phantom", "--spec", (dir / "spec.json").string(), "--out", (dir / "vol.mhd").string(),
                     "--out-truth", (dir / "truth.mhd").string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out == "truth_voxels 8000\n");
}

std::vector<std::string> segment_args(const TempDir& dir, const std::string& mask, const std::string& seed) {
  return {"segment", "--input", (dir / "vol.mhd").string(), "--seed", seed, "--edge", "36", "--rays-per-edge", "5",
          "--nodes-per-ray", "19", "--delta", "2", "--out-mask", (dir / mask).string()};
}

}  // namespace

TEST_CASE("phantom is reproducible byte for byte") {
  TempDir dir;
  make_phantom(dir);
  const std::string vol = slurp(dir / "vol.raw"), truth = slurp(dir / "truth.raw");
  make_phantom(dir);
  CHECK(slurp(dir / "vol.raw") == vol);
  CHECK(slurp(dir / "truth.raw") == truth);
  CHECK(slurp(dir / "vol.mhd").find("ElementType = MET_FLOAT") != std::string::npos);
}

TEST_CASE("segment, report and dsc") {
  TempDir dir;
  make_phantom(dir);
  auto args = segment_args(dir, "a.mhd", "23.5,23.5,23.5");
  args.insert(args.end(), {"--out-mesh", (dir / "a.stl").string(), "--report", (dir / "report.csv").string(),
                           "--truth", (dir / "truth.mhd").string(), "--dump-network", (dir / "net.txt").string()});
  const Run r = run(args);
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("cut_value ") == 0);
  const auto at = r.out.find("\ndsc ");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(r.out.substr(at + 5)) >= 0.9);

  const std::string csv = slurp(dir / "report.csv");
  CHECK(csv.find("vol,") != std::string::npos);
  CHECK(slurp(dir / "a.stl").rfind("solid", 0) == 0);
  CHECK(slurp(dir / "net.txt").find(" t ") != std::string::npos);

  SUBCASE("same inputs give the same mask") {
    REQUIRE(run(segment_args(dir, "b.mhd", "23.5,23.5,23.5")).code == cli::kExitOk);
    CHECK(slurp(dir / "a.raw") == slurp(dir / "b.raw"));
    const Run d = run({"dsc", "--a", (dir / "a.mhd").string(), "--b", (dir / "b.mhd").string()});
    CHECK(d.code == cli::kExitOk);
    CHECK(d.out == "1.0000\n");
  }
  SUBCASE("voxel seed units") {
    REQUIRE(run(segment_args(dir, "c.mhd", "23.5,23.5,23.5")).code == cli::kExitOk);
    // Origin 0 and 1 mm spacing make voxel and mm coordinates coincide.
    auto vargs = segment_args(dir, "v.mhd", "23.5,23.5,23.5");
    vargs.insert(vargs.end(), {"--seed-units", "voxel"});
    REQUIRE(run(vargs).code == cli::kExitOk);
    CHECK(slurp(dir / "c.raw") == slurp(dir / "v.raw"));
  }
  SUBCASE("dsc against the truth matches the segment report") {
    const Run d = run({"dsc", "--a", (dir / "truth.mhd").string(), "--b", (dir / "a.mhd").string()});
    CHECK(d.code == cli::kExitOk);
    CHECK(r.out.find("dsc " + d.out) != std::string::npos);
  }
}

TEST_CASE("info") {
  TempDir dir;
  make_phantom(dir);
  const Run r = run({"info", "--input", (dir / "vol.mhd").string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("dims 48 48 48\n") == 0);
  CHECK(r.out.find("spacing 1 1 1\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir dir;
  make_phantom(dir);
  SUBCASE("seed outside the volume is a runtime error") {
    const Run r = run(segment_args(dir, "x.mhd", "500,0,0"));
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.err.find("500") != std::string::npos);
  }
  SUBCASE("missing input file") {
    const Run r = run({"dsc", "--a", (dir / "nope.mhd").string(), "--b", (dir / "truth.mhd").string()});
    CHECK(r.code == cli::kExitRuntime);
  }
  SUBCASE("usage errors") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"bogus"}).code == cli::kExitUsage);
    CHECK(run({"segment", "--input", "x.mhd"}).code == cli::kExitUsage);
    CHECK(run({"segment", "--input", "x.mhd", "--seed", "1,2", "--out-mask", "m.mhd"}).code == cli::kExitUsage);
    auto args = segment_args(dir, "x.mhd", "23.5,23.5,23.5");
    args.insert(args.end(), {"--template", "pyramid"});
    CHECK(run(args).code == cli::kExitUsage);
  }
  SUBCASE("help is success") { CHECK(run({"--help"}).code == cli::kExitOk); }
  SUBCASE("small-cube warning goes to stderr with exit 0") {
    auto args = segment_args(dir, "w.mhd", "23.5,23.5,23.5");
    args[6] = "8";  // edge well inside the box
    const Run r = run(args);
    CHECK(r.code == cli::kExitOk);
    CHECK(r.err.find("warning:") != std::string::npos);
  }
}
