#include "cubecut/server.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cubecut/eval.hpp"
#include "cubecut/mhd.hpp"
#include "cubecut/slice.hpp"

namespace cubecut {
namespace {

using nlohmann::json;

constexpr const char* kPrefix = "/api/v1";

// Maps to an HTTP status at the route boundary.
struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& message) : std::runtime_error(message), status(status) {}
  int status;
};

std::uint64_t parse_id(const std::string& text) {
  std::uint64_t id = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw HttpError(404, "unknown id");
  return id;
}

json dims_json(const Dims& d) { return json::array({d.nx, d.ny, d.nz}); }
json vec_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

// Runs a handler, translating exceptions into status codes. Internal errors
// get an opaque message.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const HttpError& e) {
      send_error(res, e.status, e.what());
    } catch (const SeedOutsideVolume& e) {
      send_error(res, 422, e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("malformed body: ") + e.what());
    } catch (const MhdError& e) {
      send_error(res, 400, e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception&) {
      send_error(res, 500, "internal error");
    }
  };
}

// Accepts multipart fields "header" + "raw", or a single-file LOCAL .mhd body.
Volume volume_from_request(const httplib::Request& req) {
  if (req.is_multipart_form_data()) {
    if (!req.has_file("header")) throw HttpError(400, "multipart upload needs a 'header' part");
    const auto header = req.get_file_value("header").content;
    const auto raw = req.has_file("raw") ? req.get_file_value("raw").content : std::string();
    return load_mhd_from_memory(header, raw);
  }
  if (req.body.empty()) throw HttpError(400, "empty upload");
  return load_mhd_from_memory(req.body);
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw HttpError(400, "window must be LO,HI");
  try {
    std::size_t used_lo = 0, used_hi = 0;
    const std::string lo_text = text.substr(0, comma), hi_text = text.substr(comma + 1);
    const double lo = std::stod(lo_text, &used_lo);
    const double hi = std::stod(hi_text, &used_hi);
    if (used_lo != lo_text.size() || used_hi != hi_text.size()) throw std::invalid_argument("");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw HttpError(400, "window must be LO,HI");
  }
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {
  if (!data_dir_.empty()) std::filesystem::create_directories(data_dir_);
}

std::uint64_t SessionStore::add_volume(Volume volume) {
  auto ptr = std::make_shared<const Volume>(std::move(volume));
  std::lock_guard lock(mutex_);
  const auto id = next_volume_++;
  volumes_.emplace(id, std::move(ptr));
  return id;
}

std::uint64_t SessionStore::add_mask(Mask mask) {
  auto ptr = std::make_shared<const Mask>(std::move(mask));
  std::uint64_t id = 0;
  {
    std::lock_guard lock(mutex_);
    id = next_mask_++;
    masks_.emplace(id, ptr);
  }
  if (!data_dir_.empty()) save_mask_mhd(*ptr, data_dir_ / ("mask_" + std::to_string(id) + ".mhd"));
  return id;
}

std::shared_ptr<const Volume> SessionStore::volume(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  const auto it = volumes_.find(id);
  return it == volumes_.end() ? nullptr : it->second;
}

std::shared_ptr<const Mask> SessionStore::mask(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  const auto it = masks_.find(id);
  return it == masks_.end() ? nullptr : it->second;
}

Params params_from_json(const json& body) {
  if (!body.is_object()) throw std::invalid_argument("segment body must be a JSON object");
  Params p;
  const auto& seed = body.at("seed_mm");
  if (!seed.is_array() || seed.size() != 3) throw std::invalid_argument("seed_mm must be [x, y, z]");
  p.seed = {seed[0].get<double>(), seed[1].get<double>(), seed[2].get<double>()};

  const std::string kind = body.value("template", std::string("cube"));
  if (kind == "cube") p.kind = TemplateKind::cube;
  else if (kind == "sphere") p.kind = TemplateKind::sphere;
  else throw std::invalid_argument("template must be 'cube' or 'sphere'");

  p.edge_mm = body.value("edge_mm", p.edge_mm);
  p.m = body.value("m", p.m);
  p.n_theta = body.value("n_theta", p.n_theta);
  p.n_phi = body.value("n_phi", p.n_phi);
  p.k = body.value("k", p.k);
  p.delta = body.value("delta", p.delta);
  p.stats_halfwidth = body.value("stats_halfwidth", p.stats_halfwidth);
  if (p.delta < 0) throw std::invalid_argument("delta must be >= 0");
  if (p.stats_halfwidth < 0) throw std::invalid_argument("stats_halfwidth must be >= 0");
  return p;
}

json contours_json(const Mask& mask) {
  json out = json::object();
  for (const Plane plane : {Plane::axial, Plane::coronal, Plane::sagittal}) {
    json slices = json::array();
    const auto count = slice_count(mask.dims, plane);
    for (std::int64_t index = 0; index < count; ++index) {
      const auto slice = extract_slice(mask, plane, index);
      if (std::none_of(slice.pixels.begin(), slice.pixels.end(), [](std::uint8_t v) { return v != 0; }))
        continue;
      json polylines = json::array();
      for (const auto& line : trace_contours(slice)) {
        json pts = json::array();
        for (const auto& p : line) pts.push_back({p[0], p[1]});
        polylines.push_back(std::move(pts));
      }
      slices.push_back({{"index", index}, {"polylines", std::move(polylines)}});
    }
    out[plane_name(plane)] = std::move(slices);
  }
  return out;
}

ApiServer::ApiServer(std::filesystem::path data_dir)
    : store_(std::move(data_dir)), http_(std::make_unique<httplib::Server>()) {
  register_routes();
}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::listen(const std::string& host, int port) { return http_->listen(host, port); }
int ApiServer::bind_to_any_port(const std::string& host) { return http_->bind_to_any_port(host); }
bool ApiServer::listen_after_bind() { return http_->listen_after_bind(); }
void ApiServer::stop() {
  if (http_) http_->stop();
}
void ApiServer::wait_until_ready() const { http_->wait_until_ready(); }

void ApiServer::register_routes() {
  auto& http = *http_;
  const std::string prefix = kPrefix;

  http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  http.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  http.Post(prefix + "/volumes", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Volume volume = volume_from_request(req);
    const json body = {{"dims", dims_json(volume.dims())}, {"spacing", vec_json(volume.spacing())}};
    const auto id = store_.add_volume(std::move(volume));
    json out = body;
    out["volume_id"] = id;
    send_json(res, out, 201);
  }));

  http.Get(prefix + "/volumes/:id/slice",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto volume = store_.volume(parse_id(req.path_params.at("id")));
             if (!volume) throw HttpError(404, "unknown volume id");
             const auto plane = parse_plane(req.get_param_value("plane"));
             if (!plane) throw HttpError(400, "plane must be axial, sagittal or coronal");
             std::int64_t index = 0;
             const auto text = req.get_param_value("index");
             const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
             if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
               throw HttpError(400, "index must be an integer");
             if (index < 0 || index >= slice_count(volume->dims(), *plane))
               throw HttpError(404, "slice index out of range");

             double lo = volume->min_value(), hi = volume->max_value();
             if (req.has_param("window")) std::tie(lo, hi) = parse_window(req.get_param_value("window"));
             const auto image = apply_window(extract_slice(*volume, *plane, index), lo, hi);
             res.set_content(encode_png(image), "image/png");
           }));

  http.Post(prefix + "/volumes/:id/segment",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto volume = store_.volume(parse_id(req.path_params.at("id")));
              if (!volume) throw HttpError(404, "unknown volume id");
              const Params params = params_from_json(json::parse(req.body));
              Segmentation seg = segment(*volume, params);
              json out;
              out["cut_value"] = seg.cut_value;
              out["energy"] = seg.energy;
              out["warnings"] = seg.warnings;
              out["voxels"] = seg.mask.count();
              out["per_slice_contours"] = contours_json(seg.mask);
              out["mask_id"] = store_.add_mask(std::move(seg.mask));
              send_json(res, out, 200);
            }));

  http.Post(prefix + "/masks", guarded([this](const httplib::Request& req, httplib::Response& res) {
    Mask mask = mask_from_volume(volume_from_request(req));
    const json body = {{"dims", dims_json(mask.dims)}, {"spacing", vec_json(mask.spacing)}};
    json out = body;
    out["mask_id"] = store_.add_mask(std::move(mask));
    send_json(res, out, 201);
  }));

  http.Get(prefix + "/masks/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto mask = store_.mask(parse_id(req.path_params.at("id")));
    if (!mask) throw HttpError(404, "unknown mask id");
    res.set_content(mask_to_local_mhd(*mask), "application/octet-stream");
    res.set_header("Content-Disposition",
                   "attachment; filename=\"mask_" + req.path_params.at("id") + ".mhd\"");
  }));

  http.Post(prefix + "/masks/:id/dsc",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto mask = store_.mask(parse_id(req.path_params.at("id")));
              if (!mask) throw HttpError(404, "unknown mask id");
              const json body = json::parse(req.body);
              const auto ref = store_.mask(body.at("reference_mask_id").get<std::uint64_t>());
              if (!ref) throw HttpError(404, "unknown reference mask id");
              send_json(res, {{"dsc", dsc(*mask, *ref)}});
            }));
}

}  // namespace cubecut
