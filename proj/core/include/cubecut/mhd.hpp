#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cubecut/volume.hpp"

namespace cubecut {

/// Malformed or unsupported MetaImage input.
class MhdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ElementType { uchar, short_, ushort, float_ };

/// Parsed MetaImage header. Only the keys this library understands are kept.
struct MhdHeader {
  Dims dims{};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 offset{};
  ElementType element_type = ElementType::uchar;
  bool big_endian = false;
  std::string data_file;  // "LOCAL" when the payload follows the header
};

MhdHeader parse_mhd_header(std::string_view text);

std::size_t element_size(ElementType type);

/// Decodes a raw payload according to header. Throws on size mismatch.
Volume decode_mhd(const MhdHeader& header, std::string_view raw);

/// Reads a .mhd file and the raw file it references (or its LOCAL payload).
Volume load_mhd(const std::filesystem::path& path);

/// Parses an in-memory MetaImage. With raw empty the header must be
/// ElementDataFile = LOCAL and carry its payload.
Volume load_mhd_from_memory(std::string_view header_or_local, std::string_view raw = {});

/// Writes mask as MET_UCHAR {0,1}: path (.mhd) plus a sibling .raw.
void save_mask_mhd(const Mask& mask, const std::filesystem::path& path);

/// Single-file MetaImage (ElementDataFile = LOCAL) of a mask, for downloads.
std::string mask_to_local_mhd(const Mask& mask);

/// Writes a volume as MET_FLOAT .mhd/.raw (used for phantoms).
void save_volume_mhd(const Volume& volume, const std::filesystem::path& path);

/// Nonzero voxels of a volume become 1.
Mask mask_from_volume(const Volume& volume);

}  // namespace cubecut
