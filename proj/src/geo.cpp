#include "covis/geo.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "covis/errors.hpp"

namespace covis {

void BoundingBox::validate() const {
    if (!(lat_min < lat_max)) {
        throw ConfigError("bounding box: lat_min must be < lat_max");
    }
    if (!(lon_min < lon_max)) {
        throw ConfigError("bounding box: lon_min must be < lon_max (antimeridian boxes unsupported)");
    }
}

BoundingBox europe_bbox() {
    return BoundingBox{34.0, 72.0, -25.0, 45.0};
}

void ColumnLayout::validate() const {
    const std::array<int, 4> cols{photo_id_col, user_id_col, lon_col, lat_col};
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] < 0) {
            throw ConfigError("column layout: indices must be non-negative");
        }
        for (std::size_t j = i + 1; j < cols.size(); ++j) {
            if (cols[i] == cols[j]) {
                throw ConfigError("column layout: the four column indices must be distinct");
            }
        }
    }
}

namespace {

// Parses a full-match finite double; returns false on any leftover text,
// overflow, nan or inf.
bool parse_finite_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        return false;
    }
    return std::isfinite(out);
}

}  // namespace

ParseResult parse_line(std::string_view line, const ColumnLayout& layout) {
    // Single pass over the line, grabbing only the four target columns.
    // A column past the end of the row behaves like an empty field.
    std::string_view photo_id, user_id, lon_text, lat_text;
    const int max_col =
        std::max(std::max(layout.photo_id_col, layout.user_id_col), std::max(layout.lon_col, layout.lat_col));
    int col = 0;
    std::size_t pos = 0;
    while (col <= max_col) {
        std::size_t end = line.find(layout.delimiter, pos);
        std::string_view field =
            line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        if (col == layout.photo_id_col) photo_id = field;
        if (col == layout.user_id_col) user_id = field;
        if (col == layout.lon_col) lon_text = field;
        if (col == layout.lat_col) lat_text = field;
        if (end == std::string_view::npos) break;
        pos = end + 1;
        ++col;
    }

    ParseResult res;
    if (lon_text.empty() || lat_text.empty()) {
        res.status = ParseStatus::kSkip;  // non-geotagged object
        return res;
    }

    double lon = 0.0, lat = 0.0;
    if (!parse_finite_double(lon_text, lon)) {
        res.status = ParseStatus::kError;
        res.issue = {0, layout.lon_col, "malformed longitude '" + std::string(lon_text) + "'"};
        return res;
    }
    if (!parse_finite_double(lat_text, lat)) {
        res.status = ParseStatus::kError;
        res.issue = {0, layout.lat_col, "malformed latitude '" + std::string(lat_text) + "'"};
        return res;
    }
    if (lon < -180.0 || lon > 180.0) {
        res.status = ParseStatus::kError;
        res.issue = {0, layout.lon_col, "longitude out of range: " + std::string(lon_text)};
        return res;
    }
    if (lat < -90.0 || lat > 90.0) {
        res.status = ParseStatus::kError;
        res.issue = {0, layout.lat_col, "latitude out of range: " + std::string(lat_text)};
        return res;
    }
    if (user_id.empty()) {
        res.status = ParseStatus::kError;
        res.issue = {0, layout.user_id_col, "empty user id on a geotagged row"};
        return res;
    }

    res.status = ParseStatus::kRecord;
    res.record = PhotoRecord{std::string(photo_id), std::string(user_id), lon, lat};
    return res;
}

bool in_bbox(const PhotoRecord& rec, const BoundingBox& box) {
    return rec.lat >= box.lat_min && rec.lat <= box.lat_max && rec.lon >= box.lon_min && rec.lon <= box.lon_max;
}

}  // namespace covis
