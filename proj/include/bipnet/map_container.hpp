#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bipnet {

class Raster;

/// Binary prediction-map container.
///
/// Layout, little-endian:
///   bytes 0..3    magic "BIPM"
///   bytes 4..7    version, uint32 (currently 1)
///   bytes 8..19   height, width, channels, uint32 each
///   then          channels * height * width float32 values, channel-major
///                 then row-major
/// Channel 0 is the shrink probability; channels 1..M are ray distances in
/// theta-index order.
struct MapContainer {
  uint32_t height = 0;
  uint32_t width = 0;
  uint32_t channels = 0;
  std::vector<float> payload;  // channels * height * width

  float at(uint32_t channel, uint32_t r, uint32_t c) const {
    return payload[(static_cast<std::size_t>(channel) * height + r) * width + c];
  }
};

inline constexpr char kMapMagic[4] = {'B', 'I', 'P', 'M'};
inline constexpr uint32_t kMapVersion = 1;
inline constexpr std::size_t kMapHeaderBytes = 20;

void write_maps(const MapContainer& maps, std::ostream& out);
MapContainer read_maps(std::istream& in);

void write_maps_file(const MapContainer& maps, const std::string& path);
MapContainer read_maps_file(const std::string& path);

std::vector<char> write_maps_bytes(const MapContainer& maps);
MapContainer read_maps_bytes(const char* data, std::size_t size);

/// Channel c as a Raster (doubles), and back.
Raster channel_raster(const MapContainer& maps, uint32_t channel);
MapContainer pack_maps(const Raster& shrink, const std::vector<Raster>& distance_maps);

}  // namespace bipnet
