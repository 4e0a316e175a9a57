#pragma once

#include <filesystem>
#include <set>
#include <vector>

#include <json.hpp>

#include "covis/graph.hpp"
#include "covis/metrics.hpp"

namespace covis {

enum class ExportFormat {
    kEdgeTsv,
    kNodesTsv,
    kDistTsv,  // degree + weight distributions
    kKnnTsv,
    kMapTsv,
    kSummaryJson,
    kGraphBinary,
};

enum class MapMetric {
    kChebyshev,    // max(|dlat|, |dlon|) of cell centers, in degrees
    kGreatCircle,  // central angle between cell centers, in degrees
};

struct ExportConfig {
    std::filesystem::path output_dir;
    double map_max_separation_deg = 10.0;
    MapMetric map_metric = MapMetric::kChebyshev;
    std::set<ExportFormat> formats;

    void validate() const;  // throws ConfigError
};

struct MetricsOptions {
    FitMethod fit_method = FitMethod::kLogBinRegression;
    std::optional<std::uint64_t> x_min;
    KnnAveraging knn_averaging = KnnAveraging::kPerVertex;
};

// All TSVs are UTF-8, tab-delimited, with one header line prefixed "#".

/// One line per undirected edge, canonical order:
/// u_lat_milli, u_lon_milli, v_lat_milli, v_lon_milli, weight.
void export_edges(const CoVisGraph& g, const std::filesystem::path& path);

/// Inverse of export_edges, for round-trip rebuilding.
std::vector<WeightedEdge> import_edge_tsv(const std::filesystem::path& path);

/// One line per vertex: lat_milli, lon_milli, degree.
void export_nodes(const CoVisGraph& g, const std::filesystem::path& path);

/// Rows (value, count, probability) sorted by value, log-log plot ready.
void export_distribution(const Histogram& h, const std::filesystem::path& path);

/// Rows (k, knn_avg) sorted by k.
void export_knn(const KnnCurve& curve, const std::filesystem::path& path);

/// Drawable map segments: edges whose endpoint cell centers are separated
/// by less than the cutoff. Columns: u_lat, u_lon, v_lat, v_lon (degrees,
/// cell centers), weight.
void export_map_edges(const CoVisGraph& g, const ExportConfig& cfg, const std::filesystem::path& path);

/// Single summary document: N, M, component report, weight stats, both
/// distribution fits, assortativity. Metrics that cannot be computed on a
/// degenerate graph are null.
nlohmann::json summary_report(const CoVisGraph& g, const MetricsOptions& opt);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace covis
