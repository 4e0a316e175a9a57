#include "covis/quantize.hpp"

#include <cmath>
#include <numbers>

namespace covis {

namespace {
constexpr double kGridEpsilon = 1e-9;
constexpr double kEarthRadiusMeters = 6371008.8;  // IUGG mean radius
}  // namespace

LocationId quantize(double lat, double lon) {
    return LocationId{static_cast<std::int32_t>(std::floor(lat * 1000.0 + kGridEpsilon)),
                      static_cast<std::int32_t>(std::floor(lon * 1000.0 + kGridEpsilon))};
}

GeoPoint cell_center(LocationId id) {
    return GeoPoint{(static_cast<double>(id.lat_milli) + 0.5) / 1000.0,
                    (static_cast<double>(id.lon_milli) + 0.5) / 1000.0};
}

std::pair<double, double> cell_extent_meters(double lat_deg) {
    const double rad_per_milli = 1e-3 * std::numbers::pi / 180.0;
    const double lat_extent = rad_per_milli * kEarthRadiusMeters;
    const double lon_extent = lat_extent * std::cos(lat_deg * std::numbers::pi / 180.0);
    return {lat_extent, lon_extent};
}

}  // namespace covis
