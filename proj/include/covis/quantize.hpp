#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <utility>

namespace covis {

/// Millidegree grid cell, the vertex identity of the network.
///
/// A cell is the half-open square [lat_milli, lat_milli+1) x
/// [lon_milli, lon_milli+1) in units of 1e-3 degrees. Coordinates are
/// floored onto the grid (not rounded, not truncated toward zero), so
/// (-0.0004, -0.0004) lands in cell (-1, -1).
struct LocationId {
    std::int32_t lat_milli = 0;
    std::int32_t lon_milli = 0;

    /// 64-bit key: lat_milli in the high 32 bits, lon_milli in the low 32,
    /// two's-complement bit patterns. This is the on-disk vertex key and
    /// the canonical ordering key (compared as an unsigned 64-bit value).
    constexpr std::uint64_t packed() const {
        return (static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(lat_milli)) << 32) |
               static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(lon_milli));
    }

    static constexpr LocationId from_packed(std::uint64_t key) {
        return LocationId{std::bit_cast<std::int32_t>(static_cast<std::uint32_t>(key >> 32)),
                          std::bit_cast<std::int32_t>(static_cast<std::uint32_t>(key))};
    }

    friend constexpr bool operator==(LocationId a, LocationId b) {
        return a.lat_milli == b.lat_milli && a.lon_milli == b.lon_milli;
    }
    friend constexpr std::strong_ordering operator<=>(LocationId a, LocationId b) {
        return a.packed() <=> b.packed();
    }
};

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

/// Floor the coordinates onto the millidegree grid.
///
/// Decimal text like "45.123" can parse to a double one ulp below the grid
/// line, so the product is nudged by 1e-9 before flooring; this keeps
/// decimal inputs in the intuitively-correct cell.
LocationId quantize(double lat, double lon);

/// Center of the half-open cell: ((lat_milli + 0.5)/1000, (lon_milli + 0.5)/1000).
GeoPoint cell_center(LocationId id);

/// Arc lengths (meters) of one millidegree cell at the given latitude,
/// {latitudinal extent, longitudinal extent}. At 45 degrees this is about
/// 111 m x 79 m.
std::pair<double, double> cell_extent_meters(double lat_deg);

}  // namespace covis
