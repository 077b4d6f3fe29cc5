#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cubecut/eval.hpp"
#include "cubecut/mhd.hpp"
#include "cubecut/segment.hpp"
#include "cubecut/server.hpp"

namespace cubecut::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vec3 parse_triplet(const std::string& text, const char* what) {
  std::istringstream is(text);
  Vec3 v;
  char c1 = 0, c2 = 0;
  if (!(is >> v.x >> c1 >> v.y >> c2 >> v.z) || c1 != ',' || c2 != ',')
    throw UsageError(std::string(what) + " must be X,Y,Z");
  std::string rest;
  if (is >> rest) throw UsageError(std::string(what) + " must be X,Y,Z");
  return v;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct SegmentOptions {
  std::string input;
  std::string seed;
  std::string seed_units = "mm";
  std::string kind = "cube";
  Params params;
  std::string out_mask;
  std::string out_mesh;
  std::string report;
  std::string truth;
  std::string case_id;
  std::string dump_network;
};

int do_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err) {
  const Vec3 seed = parse_triplet(o.seed, "--seed");
  const Volume volume = load_mhd(o.input);
  Params p = o.params;
  if (o.seed_units == "voxel") {
    p.seed = {volume.origin().x + seed.x * volume.spacing().x,
              volume.origin().y + seed.y * volume.spacing().y,
              volume.origin().z + seed.z * volume.spacing().z};
  } else {
    p.seed = seed;
  }
  p.kind = o.kind == "sphere" ? TemplateKind::sphere : TemplateKind::cube;

  const Segmentation seg = segment(volume, p);
  for (const auto& w : seg.warnings) err << "warning: " << w << '\n';

  save_mask_mhd(seg.mask, o.out_mask);
  if (!o.out_mesh.empty()) {
    std::ofstream stl(o.out_mesh);
    if (!stl) throw std::runtime_error("cannot write " + o.out_mesh);
    write_stl(seg.mesh, stl);
  }
  if (!o.dump_network.empty()) {
    std::ofstream dump(o.dump_network);
    if (!dump) throw std::runtime_error("cannot write " + o.dump_network);
    write_arc_list(build_network(seg.tmpl, volume, seg.stats, p.delta), dump);
  }

  EvalRow row;
  row.case_id = o.case_id.empty() ? std::filesystem::path(o.input).stem().string() : o.case_id;
  row.automatic_voxels = seg.mask.count();
  row.automatic_mm3 = mask_volume_mm3(seg.mask, volume.spacing());
  if (!o.truth.empty()) {
    const Mask truth = mask_from_volume(load_mhd(o.truth));
    row.manual_voxels = truth.count();
    row.manual_mm3 = mask_volume_mm3(truth, truth.spacing);
    row.dsc = dsc(truth, seg.mask);
  }
  if (!o.report.empty()) {
    std::ofstream csv(o.report);
    if (!csv) throw std::runtime_error("cannot write " + o.report);
    write_report_csv({row}, csv);
  }

  out << "cut_value " << seg.cut_value << '\n'
      << "voxels " << row.automatic_voxels << '\n'
      << "volume_mm3 " << fixed(row.automatic_mm3, 1) << '\n';
  if (row.dsc) out << "dsc " << fixed(*row.dsc, 4) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cube-template graph-cut segmentation", "cubecut"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  SegmentOptions seg;
  auto* segment_cmd = app.add_subcommand("segment", "Segment a volume from a single seed");
  segment_cmd->add_option("--input", seg.input, "Input .mhd volume")->required();
  segment_cmd->add_option("--seed", seg.seed, "Seed point X,Y,Z")->required();
  segment_cmd->add_option("--seed-units", seg.seed_units, "Seed units")
      ->check(CLI::IsMember({"mm", "voxel"}))
      ->capture_default_str();
  segment_cmd->add_option("--template", seg.kind, "Template shape")
      ->check(CLI::IsMember({"cube", "sphere"}))
      ->capture_default_str();
  segment_cmd->add_option("--edge", seg.params.edge_mm, "Cube edge (or sphere diameter) in mm")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  segment_cmd->add_option("--rays-per-edge", seg.params.m, "Lattice points per cube edge")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  segment_cmd->add_option("--rings", seg.params.n_theta, "Sphere rings (default: rays-per-edge)");
  segment_cmd->add_option("--rays-per-ring", seg.params.n_phi,
                          "Rays per sphere ring (default: 2 * rays-per-edge)");
  segment_cmd->add_option("--nodes-per-ray", seg.params.k, "Nodes per ray, seed included")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  segment_cmd->add_option("--delta", seg.params.delta, "Smoothness constraint")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  segment_cmd->add_option("--stats-halfwidth", seg.params.stats_halfwidth,
                          "Half-width of the seed statistics block, voxels")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  segment_cmd->add_option("--out-mask", seg.out_mask, "Output mask .mhd")->required();
  segment_cmd->add_option("--out-mesh", seg.out_mesh, "Output ASCII STL mesh");
  segment_cmd->add_option("--report", seg.report, "Evaluation CSV");
  segment_cmd->add_option("--truth", seg.truth, "Reference mask for the report");
  segment_cmd->add_option("--case-id", seg.case_id, "Case id for the report");
  segment_cmd->add_option("--dump-network", seg.dump_network, "Write the flow network arc list");

  std::string spec_path, out_volume, out_truth;
  auto* phantom_cmd = app.add_subcommand("phantom", "Generate a box phantom from a JSON spec");
  phantom_cmd->add_option("--spec", spec_path, "Phantom spec JSON")->required();
  phantom_cmd->add_option("--out", out_volume, "Output volume .mhd")->required();
  phantom_cmd->add_option("--out-truth", out_truth, "Output ground-truth mask .mhd")->required();

  std::string mask_a, mask_b;
  auto* dsc_cmd = app.add_subcommand("dsc", "Dice similarity of two masks");
  dsc_cmd->add_option("--a", mask_a, "First mask .mhd")->required();
  dsc_cmd->add_option("--b", mask_b, "Second mask .mhd")->required();

  std::string info_input;
  auto* info_cmd = app.add_subcommand("info", "Print volume geometry");
  info_cmd->add_option("--input", info_input, "Input .mhd volume")->required();

  int port = 8080;
  std::string data_dir = "data", host = "127.0.0.1";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535))->capture_default_str();
  serve_cmd->add_option("--data-dir", data_dir, "Directory for stored masks")->capture_default_str();
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*segment_cmd) return do_segment(seg, out, err);

    if (*phantom_cmd) {
      std::ifstream in(spec_path);
      if (!in) throw std::runtime_error("cannot open " + spec_path);
      const PhantomSpec spec = phantom_spec_from_json(nlohmann::json::parse(in));
      const Phantom ph = gen_phantom(spec);
      save_volume_mhd(ph.volume, out_volume);
      save_mask_mhd(ph.truth, out_truth);
      out << "truth_voxels " << ph.truth.count() << '\n';
      return kExitOk;
    }

    if (*dsc_cmd) {
      const Mask a = mask_from_volume(load_mhd(mask_a));
      const Mask b = mask_from_volume(load_mhd(mask_b));
      out << fixed(dsc(a, b), 4) << '\n';
      return kExitOk;
    }

    if (*info_cmd) {
      const Volume v = load_mhd(info_input);
      const auto& d = v.dims();
      const auto& s = v.spacing();
      const auto& o = v.origin();
      out << "dims " << d.nx << ' ' << d.ny << ' ' << d.nz << '\n'
          << "spacing " << s.x << ' ' << s.y << ' ' << s.z << '\n'
          << "origin " << o.x << ' ' << o.y << ' ' << o.z << '\n'
          << "bounds " << v.bounds_string() << '\n'
          << "range " << v.min_value() << ' ' << v.max_value() << '\n';
      return kExitOk;
    }

    if (*serve_cmd) {
      ApiServer server(data_dir);
      out << "listening on http://" << host << ':' << port << "/api/v1" << std::endl;
      if (!server.listen(host, port)) throw std::runtime_error("cannot listen on port " + std::to_string(port));
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace cubecut::cli
