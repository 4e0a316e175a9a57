#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>

#include "covis/geo.hpp"
#include "covis/line_reader.hpp"

namespace covis {

/// Per-run ingestion tally. Merging is associative and commutative, so
/// sharded readers can accumulate independently and combine.
struct IngestStats {
    std::uint64_t total_lines = 0;
    std::uint64_t geotagged = 0;  // rows with both geo columns non-empty
    std::uint64_t in_box = 0;
    std::uint64_t parse_errors = 0;

    IngestStats& operator+=(const IngestStats& o) {
        total_lines += o.total_lines;
        geotagged += o.geotagged;
        in_box += o.in_box;
        parse_errors += o.parse_errors;
        return *this;
    }
    friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

struct IngestOptions {
    ColumnLayout layout;
    BoundingBox bbox = europe_bbox();
    bool strict = false;  // make malformed geo values fatal
    // Called every `progress_every` lines when set; the CLI points this
    // at stderr.
    std::uint64_t progress_every = 1'000'000;
    std::function<void(std::uint64_t lines)> progress;
};

using RecordSink = std::function<void(const PhotoRecord&)>;
using IssueSink = std::function<void(const ParseIssue&)>;

/// Streams lines through parse + bbox filter, feeding records that pass to
/// `sink`. Malformed rows are counted and (optionally) reported through
/// `issues`; under strict mode the first one throws IoError.
IngestStats ingest_lines(LineReader& in, const IngestOptions& opt, const RecordSink& sink,
                         const IssueSink& issues = {});

IngestStats ingest_file(const std::filesystem::path& path, const IngestOptions& opt, const RecordSink& sink,
                        const IssueSink& issues = {});

}  // namespace covis
