#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "cubecut/segment.hpp"
#include "cubecut/volume.hpp"

namespace httplib {
class Server;
}

namespace cubecut {

/// In-memory store behind the HTTP API. Ids are assigned from one counter
/// per kind; stored objects are immutable.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path data_dir = {});

  std::uint64_t add_volume(Volume volume);
  std::uint64_t add_mask(Mask mask);

  std::shared_ptr<const Volume> volume(std::uint64_t id) const;
  std::shared_ptr<const Mask> mask(std::uint64_t id) const;

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  std::filesystem::path data_dir_;
  mutable std::mutex mutex_;
  std::uint64_t next_volume_ = 1;
  std::uint64_t next_mask_ = 1;
  std::map<std::uint64_t, std::shared_ptr<const Volume>> volumes_;
  std::map<std::uint64_t, std::shared_ptr<const Mask>> masks_;
};

/// Reads segmentation parameters from the JSON body of a segment request.
/// Throws std::invalid_argument on missing or mistyped fields.
Params params_from_json(const nlohmann::json& body);

/// Per-plane contours of every slice the mask intersects.
nlohmann::json contours_json(const Mask& mask);

/// HTTP front end. All routes live under /api/v1:
///   POST /volumes                  upload (multipart header+raw, or LOCAL .mhd body)
///   GET  /volumes/{id}/slice       8-bit PNG (plane, index, window=LO,HI)
///   POST /volumes/{id}/segment     run a segmentation
///   POST /masks                    upload a reference mask
///   GET  /masks/{id}               mask as a single-file .mhd
///   POST /masks/{id}/dsc           {"reference_mask_id": N} -> {"dsc": x}
class ApiServer {
 public:
  explicit ApiServer(std::filesystem::path data_dir = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Blocks serving requests until stop().
  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it; follow with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

  SessionStore& store() { return store_; }

 private:
  void register_routes();

  SessionStore store_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace cubecut
