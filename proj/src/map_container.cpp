#include "bipnet/map_container.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bipnet/raster.hpp"

namespace bipnet {

namespace {

constexpr uint64_t kMaxElements = uint64_t{1} << 31;

void put_u32(std::ostream& out, uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw Error(ErrorCode::Truncated, "container header ends early");
  return uint32_t(bytes[0]) | (uint32_t(bytes[1]) << 8) | (uint32_t(bytes[2]) << 16) |
         (uint32_t(bytes[3]) << 24);
}

}  // namespace

void write_maps(const MapContainer& maps, std::ostream& out) {
  const uint64_t elements =
      uint64_t(maps.height) * uint64_t(maps.width) * uint64_t(maps.channels);
  if (maps.payload.size() != elements) {
    throw Error(ErrorCode::InvalidArgument, "payload size does not match dimensions");
  }
  if (elements > kMaxElements) {
    throw Error(ErrorCode::Oversize, "container exceeds the 2^31 element limit");
  }
  out.write(kMapMagic, 4);
  put_u32(out, kMapVersion);
  put_u32(out, maps.height);
  put_u32(out, maps.width);
  put_u32(out, maps.channels);
  for (float f : maps.payload) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }
  if (!out) throw Error(ErrorCode::IoFailure, "container write failed");
}

MapContainer read_maps(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in) throw Error(ErrorCode::Truncated, "container shorter than its magic");
  if (std::memcmp(magic, kMapMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not a prediction-map container");
  }
  const uint32_t version = get_u32(in);
  if (version != kMapVersion) {
    throw Error(ErrorCode::BadVersion, "unsupported container version " + std::to_string(version));
  }
  MapContainer maps;
  maps.height = get_u32(in);
  maps.width = get_u32(in);
  maps.channels = get_u32(in);
  const uint64_t elements =
      uint64_t(maps.height) * uint64_t(maps.width) * uint64_t(maps.channels);
  if (maps.height == 0 || maps.width == 0 || maps.channels == 0 || elements > kMaxElements) {
    throw Error(ErrorCode::Oversize, "container dimensions out of range");
  }
  maps.payload.resize(elements);
  std::vector<char> raw(elements * 4);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw Error(ErrorCode::Truncated, "container payload ends early");
  }
  for (uint64_t i = 0; i < elements; ++i) {
    const unsigned char* b = reinterpret_cast<const unsigned char*>(raw.data()) + i * 4;
    const uint32_t bits =
        uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
    std::memcpy(&maps.payload[i], &bits, 4);
  }
  return maps;
}

void write_maps_file(const MapContainer& maps, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  write_maps(maps, out);
}

MapContainer read_maps_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  return read_maps(in);
}

std::vector<char> write_maps_bytes(const MapContainer& maps) {
  std::ostringstream out(std::ios::binary);
  write_maps(maps, out);
  const std::string s = out.str();
  return std::vector<char>(s.begin(), s.end());
}

MapContainer read_maps_bytes(const char* data, std::size_t size) {
  std::istringstream in(std::string(data, size), std::ios::binary);
  return read_maps(in);
}

Raster channel_raster(const MapContainer& maps, uint32_t channel) {
  if (channel >= maps.channels) {
    throw Error(ErrorCode::OutOfBounds, "channel index out of range");
  }
  Raster out(static_cast<int>(maps.height), static_cast<int>(maps.width), 0.0);
  for (uint32_t r = 0; r < maps.height; ++r) {
    for (uint32_t c = 0; c < maps.width; ++c) {
      out(r, c) = maps.at(channel, r, c);
    }
  }
  return out;
}

MapContainer pack_maps(const Raster& shrink, const std::vector<Raster>& distance_maps) {
  for (const Raster& d : distance_maps) {
    if (!d.same_shape(shrink)) {
      throw Error(ErrorCode::DimensionMismatch, "map shapes differ");
    }
  }
  MapContainer maps;
  maps.height = static_cast<uint32_t>(shrink.height());
  maps.width = static_cast<uint32_t>(shrink.width());
  maps.channels = static_cast<uint32_t>(distance_maps.size() + 1);
  maps.payload.reserve(std::size_t(maps.height) * maps.width * maps.channels);
  auto append = [&](const Raster& r) {
    for (double v : r.data()) maps.payload.push_back(static_cast<float>(v));
  };
  append(shrink);
  for (const Raster& d : distance_maps) append(d);
  return maps;
}

}  // namespace bipnet
