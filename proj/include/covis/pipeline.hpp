#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "covis/builder.hpp"
#include "covis/graph.hpp"
#include "covis/ingest.hpp"

namespace covis {

struct PipelineResult {
    CoVisGraph graph;
    IngestStats ingest;
    BuildStats build;
};

/// Ingest every input file in order, quantize, project, threshold. The
/// result graph is a function of the input record multiset only.
PipelineResult build_from_files(const std::vector<std::filesystem::path>& inputs, const IngestOptions& in_opt,
                                const BuildConfig& build_cfg);

nlohmann::json stats_json(const IngestStats& in, const BuildStats& build);

}  // namespace covis
