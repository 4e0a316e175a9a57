#include "covis/ingest.hpp"

#include <string>

#include "covis/errors.hpp"

namespace covis {

IngestStats ingest_lines(LineReader& in, const IngestOptions& opt, const RecordSink& sink,
                         const IssueSink& issues) {
    opt.layout.validate();
    opt.bbox.validate();

    IngestStats st;
    std::string line;
    while (in.next(line)) {
        ++st.total_lines;
        if (opt.progress && opt.progress_every > 0 && st.total_lines % opt.progress_every == 0) {
            opt.progress(st.total_lines);
        }
        ParseResult res = parse_line(line, opt.layout);
        switch (res.status) {
            case ParseStatus::kSkip:
                break;
            case ParseStatus::kError: {
                ++st.geotagged;  // both geo columns were present
                ++st.parse_errors;
                res.issue.line_no = st.total_lines;
                if (opt.strict) {
                    throw IoError("strict mode: " + in.path().string() + " line " +
                                  std::to_string(res.issue.line_no) + " column " +
                                  std::to_string(res.issue.column) + ": " + res.issue.message);
                }
                if (issues) {
                    issues(res.issue);
                }
                break;
            }
            case ParseStatus::kRecord:
                ++st.geotagged;
                if (in_bbox(res.record, opt.bbox)) {
                    ++st.in_box;
                    sink(res.record);
                }
                break;
        }
    }
    return st;
}

IngestStats ingest_file(const std::filesystem::path& path, const IngestOptions& opt, const RecordSink& sink,
                        const IssueSink& issues) {
    LineReader reader(path);
    return ingest_lines(reader, opt, sink, issues);
}

}  // namespace covis
