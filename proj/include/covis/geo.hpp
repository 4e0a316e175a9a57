#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace covis {

/// One parsed geotagged media row.
struct PhotoRecord {
    std::string photo_id;
    std::string user_id;
    double lon = 0.0;  // degrees, [-180, 180]
    double lat = 0.0;  // degrees, [-90, 90]
};

/// Closed axis-aligned region filter. Antimeridian-crossing boxes are
/// unsupported (lon_min < lon_max is required).
struct BoundingBox {
    double lat_min = -90.0;
    double lat_max = 90.0;
    double lon_min = -180.0;
    double lon_max = 180.0;

    void validate() const;  // throws ConfigError
};

/// Default region of interest: continental Europe including the
/// Iceland/Canaries fringe. A config knob, not a constant of nature.
BoundingBox europe_bbox();

/// Where the interesting fields live in a delimiter-separated row.
/// Defaults follow the public YFCC100M layout.
struct ColumnLayout {
    int photo_id_col = 0;
    int user_id_col = 1;
    int lon_col = 10;
    int lat_col = 11;
    char delimiter = '\t';

    void validate() const;  // throws ConfigError: indices distinct and >= 0
};

enum class ParseStatus {
    kRecord,  // a valid geotagged record
    kSkip,    // non-geotagged row (a geo column is empty or missing)
    kError,   // geo columns present but malformed or out of range
};

struct ParseIssue {
    std::uint64_t line_no = 0;  // filled by the caller
    int column = -1;
    std::string message;
};

struct ParseResult {
    ParseStatus status = ParseStatus::kSkip;
    PhotoRecord record;
    ParseIssue issue;
};

/// Parse one delimiter-separated row. Never throws; malformed input is
/// reported through the result so the caller can count and continue.
ParseResult parse_line(std::string_view line, const ColumnLayout& layout);

/// Closed-box containment test (boundary points are inside).
bool in_bbox(const PhotoRecord& rec, const BoundingBox& box);

}  // namespace covis
