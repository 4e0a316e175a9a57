#include "covis/pipeline.hpp"

namespace covis {

PipelineResult build_from_files(const std::vector<std::filesystem::path>& inputs, const IngestOptions& in_opt,
                                const BuildConfig& build_cfg) {
    PipelineResult res;
    VisitCollector collector;
    for (const auto& path : inputs) {
        res.ingest += ingest_file(path, in_opt, [&](const PhotoRecord& rec) { collector.add(rec); });
    }
    res.graph = build_from_visits(collector.take(), build_cfg, &res.build);
    return res;
}

nlohmann::json stats_json(const IngestStats& in, const BuildStats& build) {
    nlohmann::json j;
    j["ingest"] = {{"total_lines", in.total_lines},
                   {"geotagged", in.geotagged},
                   {"in_box", in.in_box},
                   {"parse_errors", in.parse_errors}};
    j["build"] = {{"users", build.users},
                  {"users_capped", build.users_capped},
                  {"distinct_locations_seen", build.distinct_locations_seen},
                  {"pairs_emitted", build.pairs_emitted},
                  {"edges_kept", build.edges_kept},
                  {"spill_runs", build.spill_runs},
                  {"N", build.n_vertices},
                  {"M", build.m_edges}};
    return j;
}

}  // namespace covis
