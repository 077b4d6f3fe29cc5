#include "cubecut/mhd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

namespace cubecut {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_bool(std::string_view v, std::string_view key) {
  if (v == "True" || v == "true" || v == "1") return true;
  if (v == "False" || v == "false" || v == "0") return false;
  throw MhdError("malformed header key " + std::string(key) + ": expected True/False");
}

template <typename T, std::size_t N>
std::array<T, N> parse_numbers(std::string_view v, std::string_view key) {
  std::istringstream is{std::string(v)};
  std::array<T, N> out{};
  for (auto& x : out) {
    if (!(is >> x)) throw MhdError("malformed header key " + std::string(key));
  }
  std::string rest;
  if (is >> rest) throw MhdError("malformed header key " + std::string(key));
  return out;
}

// Splits the header from a LOCAL payload: returns the offset just past the
// ElementDataFile line, or npos when the key is absent.
std::size_t header_end(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    const auto line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    const auto eq = line.find('=');
    if (eq != std::string_view::npos && trim(line.substr(0, eq)) == "ElementDataFile")
      return eol == std::string_view::npos ? text.size() : eol + 1;
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return std::string_view::npos;
}

template <typename T>
T read_scalar(const char* p, bool big_endian) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  const bool host_big = std::endian::native == std::endian::big;
  if (big_endian != host_big) {
    auto* b = reinterpret_cast<unsigned char*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  return value;
}

std::string header_text(const Mask& mask, std::string_view data_file) {
  std::ostringstream os;
  os.precision(17);
  os << "ObjectType = Image\n"
     << "NDims = 3\n"
     << "BinaryData = True\n"
     << "BinaryDataByteOrderMSB = False\n"
     << "Offset = " << mask.origin.x << ' ' << mask.origin.y << ' ' << mask.origin.z << '\n'
     << "ElementSpacing = " << mask.spacing.x << ' ' << mask.spacing.y << ' ' << mask.spacing.z
     << '\n'
     << "DimSize = " << mask.dims.nx << ' ' << mask.dims.ny << ' ' << mask.dims.nz << '\n'
     << "ElementType = MET_UCHAR\n"
     << "ElementDataFile = " << data_file << '\n';
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MhdError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void check_mask(const Mask& mask) {
  if (!mask.dims.positive()) throw std::invalid_argument("mask dims must be positive");
  if (static_cast<std::int64_t>(mask.data.size()) != mask.dims.voxel_count())
    throw std::invalid_argument("mask data size mismatch");
}

std::string mask_payload(const Mask& mask) {
  std::string raw(mask.data.size(), '\0');
  for (std::size_t i = 0; i < mask.data.size(); ++i) raw[i] = mask.data[i] ? 1 : 0;
  return raw;
}

}  // namespace

std::size_t element_size(ElementType type) {
  switch (type) {
    case ElementType::uchar: return 1;
    case ElementType::short_:
    case ElementType::ushort: return 2;
    case ElementType::float_: return 4;
  }
  return 0;
}

MhdHeader parse_mhd_header(std::string_view text) {
  MhdHeader h;
  std::optional<int> ndims;
  bool have_dims = false, have_type = false, have_file = false;

  std::size_t pos = 0;
  while (pos < text.size() && !have_file) {
    auto eol = text.find('\n', pos);
    const auto raw_line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;

    const auto line = trim(raw_line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw MhdError("malformed header key: '" + std::string(line) + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw MhdError("malformed header key: '" + std::string(line) + "'");

    if (key == "ObjectType") {
      if (value != "Image") throw MhdError("unsupported ObjectType " + std::string(value));
    } else if (key == "NDims") {
      ndims = parse_numbers<int, 1>(value, key)[0];
      if (*ndims != 3) throw MhdError("only 3-D volumes supported");
    } else if (key == "DimSize") {
      const auto d = parse_numbers<std::int64_t, 3>(value, key);
      h.dims = {d[0], d[1], d[2]};
      if (!h.dims.positive()) throw MhdError("malformed header key DimSize: non-positive size");
      have_dims = true;
    } else if (key == "ElementSpacing") {
      const auto s = parse_numbers<double, 3>(value, key);
      h.spacing = {s[0], s[1], s[2]};
    } else if (key == "Offset" || key == "Origin" || key == "Position") {
      const auto o = parse_numbers<double, 3>(value, key);
      h.offset = {o[0], o[1], o[2]};
    } else if (key == "ElementType") {
      if (value == "MET_UCHAR") h.element_type = ElementType::uchar;
      else if (value == "MET_SHORT") h.element_type = ElementType::short_;
      else if (value == "MET_USHORT") h.element_type = ElementType::ushort;
      else if (value == "MET_FLOAT") h.element_type = ElementType::float_;
      else throw MhdError("unsupported ElementType " + std::string(value));
      have_type = true;
    } else if (key == "BinaryDataByteOrderMSB" || key == "ElementByteOrderMSB") {
      h.big_endian = parse_bool(value, key);
    } else if (key == "CompressedData") {
      if (parse_bool(value, key)) throw MhdError("compressed MetaImage data not supported");
    } else if (key == "ElementNumberOfChannels") {
      if (parse_numbers<int, 1>(value, key)[0] != 1)
        throw MhdError("only single-channel volumes supported");
    } else if (key == "ElementDataFile") {
      if (value.empty()) throw MhdError("malformed header key ElementDataFile");
      h.data_file = std::string(value);
      have_file = true;
    }
    // Other standard keys (TransformMatrix, AnatomicalOrientation, ...) are ignored.
  }

  if (!ndims) throw MhdError("missing header key NDims");
  if (!have_dims) throw MhdError("missing header key DimSize");
  if (!have_type) throw MhdError("missing header key ElementType");
  if (!have_file) throw MhdError("missing header key ElementDataFile");
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(h.spacing[a] > 0.0) || !std::isfinite(h.spacing[a]))
      throw MhdError("malformed header key ElementSpacing: spacing must be positive");
  }
  return h;
}

Volume decode_mhd(const MhdHeader& header, std::string_view raw) {
  const std::size_t esize = element_size(header.element_type);
  const auto count = static_cast<std::size_t>(header.dims.voxel_count());
  if (raw.size() != count * esize)
    throw MhdError("data size mismatch: expected " + std::to_string(count * esize) +
                   " bytes, got " + std::to_string(raw.size()));

  std::vector<double> data(count);
  const char* p = raw.data();
  for (std::size_t i = 0; i < count; ++i, p += esize) {
    switch (header.element_type) {
      case ElementType::uchar: data[i] = static_cast<unsigned char>(*p); break;
      case ElementType::short_: data[i] = read_scalar<std::int16_t>(p, header.big_endian); break;
      case ElementType::ushort: data[i] = read_scalar<std::uint16_t>(p, header.big_endian); break;
      case ElementType::float_: data[i] = read_scalar<float>(p, header.big_endian); break;
    }
  }
  return Volume(header.dims, header.spacing, header.offset, std::move(data));
}

Volume load_mhd(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const MhdHeader header = parse_mhd_header(text);
  if (header.data_file == "LOCAL") {
    return decode_mhd(header, std::string_view(text).substr(header_end(text)));
  }
  std::filesystem::path raw_path = header.data_file;
  if (raw_path.is_relative()) raw_path = path.parent_path() / raw_path;
  return decode_mhd(header, read_file(raw_path));
}

Volume load_mhd_from_memory(std::string_view header_or_local, std::string_view raw) {
  const MhdHeader header = parse_mhd_header(header_or_local);
  if (raw.empty()) {
    if (header.data_file != "LOCAL")
      throw MhdError("raw payload missing for ElementDataFile " + header.data_file);
    return decode_mhd(header, header_or_local.substr(header_end(header_or_local)));
  }
  return decode_mhd(header, raw);
}

void save_mask_mhd(const Mask& mask, const std::filesystem::path& path) {
  check_mask(mask);
  std::filesystem::path raw_path = path;
  raw_path.replace_extension(".raw");
  write_file(raw_path, mask_payload(mask));
  write_file(path, header_text(mask, raw_path.filename().string()));
}

std::string mask_to_local_mhd(const Mask& mask) {
  check_mask(mask);
  return header_text(mask, "LOCAL") + mask_payload(mask);
}

void save_volume_mhd(const Volume& volume, const std::filesystem::path& path) {
  std::filesystem::path raw_path = path;
  raw_path.replace_extension(".raw");

  std::string raw(volume.data().size() * sizeof(float), '\0');
  for (std::size_t i = 0; i < volume.data().size(); ++i) {
    float f = static_cast<float>(volume.data()[i]);
    if constexpr (std::endian::native == std::endian::big) {
      auto* b = reinterpret_cast<unsigned char*>(&f);
      std::reverse(b, b + sizeof(float));
    }
    std::memcpy(raw.data() + i * sizeof(float), &f, sizeof(float));
  }
  write_file(raw_path, raw);

  std::ostringstream os;
  os.precision(17);
  const auto& d = volume.dims();
  const auto& s = volume.spacing();
  const auto& o = volume.origin();
  os << "ObjectType = Image\nNDims = 3\nBinaryData = True\nBinaryDataByteOrderMSB = False\n"
     << "Offset = " << o.x << ' ' << o.y << ' ' << o.z << '\n'
     << "ElementSpacing = " << s.x << ' ' << s.y << ' ' << s.z << '\n'
     << "DimSize = " << d.nx << ' ' << d.ny << ' ' << d.nz << '\n'
     << "ElementType = MET_FLOAT\n"
     << "ElementDataFile = " << raw_path.filename().string() << '\n';
  write_file(path, os.str());
}

Mask mask_from_volume(const Volume& volume) {
  Mask m = Mask::like(volume);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = volume.data()[i] != 0.0 ? 1 : 0;
  return m;
}

}  // namespace cubecut
