// covis: reconstruct and analyze the co-visitation network of photo
// locations from geotagged social-media metadata.
//
// Subcommands: build (TSV -> graph snapshot), analyze (snapshot -> metrics),
// export (snapshot -> TSV/JSON artifacts), selfcheck (built-in invariants).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "covis/builder.hpp"
#include "covis/errors.hpp"
#include "covis/exporter.hpp"
#include "covis/graph.hpp"
#include "covis/metrics.hpp"
#include "covis/pipeline.hpp"
#include "covis/quantize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

char parse_delimiter(const std::string& text) {
    if (text == "\\t" || text == "tab") return '\t';
    if (text.size() != 1) {
        throw covis::ConfigError("delimiter must be one character (or 'tab')");
    }
    return text[0];
}

covis::FitMethod parse_fit_method(const std::string& name) {
    if (name == "regression") return covis::FitMethod::kLogBinRegression;
    if (name == "mle") return covis::FitMethod::kDiscreteMle;
    throw covis::ConfigError("unknown fit method '" + name + "' (use regression|mle)");
}

covis::KnnAveraging parse_knn_mode(const std::string& name) {
    if (name == "per-vertex") return covis::KnnAveraging::kPerVertex;
    if (name == "pooled") return covis::KnnAveraging::kPooled;
    throw covis::ConfigError("unknown knn averaging '" + name + "' (use per-vertex|pooled)");
}

covis::ExportFormat parse_format(const std::string& name) {
    if (name == "edge_tsv") return covis::ExportFormat::kEdgeTsv;
    if (name == "nodes_tsv") return covis::ExportFormat::kNodesTsv;
    if (name == "dist_tsv") return covis::ExportFormat::kDistTsv;
    if (name == "knn_tsv") return covis::ExportFormat::kKnnTsv;
    if (name == "map_tsv") return covis::ExportFormat::kMapTsv;
    if (name == "summary_json") return covis::ExportFormat::kSummaryJson;
    if (name == "graph_binary") return covis::ExportFormat::kGraphBinary;
    throw covis::ConfigError("unknown export format '" + name + "'");
}

struct BuildArgs {
    std::vector<std::string> inputs;
    std::string output;
    std::string stats_path;
    std::vector<double> bbox;  // lat_min, lat_max, lon_min, lon_max
    int photo_col = 0, user_col = 1, lon_col = 10, lat_col = 11;
    std::string delimiter = "\\t";
    bool strict = false;
    std::uint32_t min_users = 2;
    std::uint32_t max_locations = 0;  // 0: unlimited
    std::uint64_t memory_budget_mb = 1024;
    std::string spill_dir;
};

struct AnalyzeArgs {
    std::string snapshot;
    std::string out_dir;
    std::string fit_method = "regression";
    std::uint64_t x_min = 0;  // 0: automatic
    std::string knn_mode = "per-vertex";
};

struct ExportArgs {
    std::string snapshot;
    std::string out_dir;
    std::vector<std::string> formats;
    double map_cutoff = 10.0;
    std::string map_metric = "chebyshev";
    std::string fit_method = "regression";
    std::uint64_t x_min = 0;
    std::string knn_mode = "per-vertex";
};

covis::MetricsOptions metrics_options(const std::string& fit_method, std::uint64_t x_min,
                                      const std::string& knn_mode) {
    covis::MetricsOptions opt;
    opt.fit_method = parse_fit_method(fit_method);
    if (x_min > 0) opt.x_min = x_min;
    opt.knn_averaging = parse_knn_mode(knn_mode);
    return opt;
}

int run_build(const BuildArgs& args, unsigned threads) {
    covis::IngestOptions in_opt;
    in_opt.layout.photo_id_col = args.photo_col;
    in_opt.layout.user_id_col = args.user_col;
    in_opt.layout.lon_col = args.lon_col;
    in_opt.layout.lat_col = args.lat_col;
    in_opt.layout.delimiter = parse_delimiter(args.delimiter);
    in_opt.layout.validate();
    if (!args.bbox.empty()) {
        in_opt.bbox = covis::BoundingBox{args.bbox[0], args.bbox[1], args.bbox[2], args.bbox[3]};
    }
    in_opt.bbox.validate();
    in_opt.strict = args.strict;
    in_opt.progress = [](std::uint64_t lines) {
        std::fprintf(stderr, "covis: %llu lines read\n", static_cast<unsigned long long>(lines));
    };

    covis::BuildConfig build_cfg;
    build_cfg.min_users_per_edge = args.min_users;
    if (args.max_locations > 0) build_cfg.max_locations_per_user = args.max_locations;
    build_cfg.memory_budget_bytes = args.memory_budget_mb << 20;
    if (!args.spill_dir.empty()) build_cfg.spill_dir = args.spill_dir;
    build_cfg.threads = threads;

    std::vector<std::filesystem::path> inputs(args.inputs.begin(), args.inputs.end());
    covis::PipelineResult res = covis::build_from_files(inputs, in_opt, build_cfg);
    if (res.graph.vertex_count() == 0) {
        throw covis::IoError("empty graph: no location pair was visited by " +
                             std::to_string(build_cfg.min_users_per_edge) +
                             " distinct users inside the bounding box");
    }
    covis::save_snapshot(res.graph, args.output);
    if (!args.stats_path.empty()) {
        covis::write_json(covis::stats_json(res.ingest, res.build), args.stats_path);
    }
    std::fprintf(stderr, "covis: built N=%llu M=%llu -> %s\n",
                 static_cast<unsigned long long>(res.graph.vertex_count()),
                 static_cast<unsigned long long>(res.graph.edge_count()), args.output.c_str());
    return kExitOk;
}

int run_analyze(const AnalyzeArgs& args) {
    const covis::CoVisGraph g = covis::load_snapshot(args.snapshot);
    const covis::MetricsOptions opt = metrics_options(args.fit_method, args.x_min, args.knn_mode);
    const std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);

    covis::write_json(covis::summary_report(g, opt), dir / "summary.json");
    covis::export_distribution(covis::degree_histogram(g), dir / "degree_dist.tsv");
    covis::export_distribution(covis::weight_histogram(g).first, dir / "weight_dist.tsv");
    covis::export_knn(covis::knn_curve(g, opt.knn_averaging), dir / "knn.tsv");
    return kExitOk;
}

int run_export(const ExportArgs& args) {
    const covis::CoVisGraph g = covis::load_snapshot(args.snapshot);
    covis::ExportConfig cfg;
    cfg.output_dir = args.out_dir;
    cfg.map_max_separation_deg = args.map_cutoff;
    if (args.map_metric == "chebyshev") {
        cfg.map_metric = covis::MapMetric::kChebyshev;
    } else if (args.map_metric == "great-circle") {
        cfg.map_metric = covis::MapMetric::kGreatCircle;
    } else {
        throw covis::ConfigError("unknown map metric '" + args.map_metric + "'");
    }
    for (const std::string& f : args.formats) {
        cfg.formats.insert(parse_format(f));
    }
    if (cfg.formats.empty()) {
        throw covis::ConfigError("no export formats selected");
    }
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);

    const covis::MetricsOptions mopt = metrics_options(args.fit_method, args.x_min, args.knn_mode);
    for (covis::ExportFormat f : cfg.formats) {
        switch (f) {
            case covis::ExportFormat::kEdgeTsv:
                covis::export_edges(g, cfg.output_dir / "edges.tsv");
                break;
            case covis::ExportFormat::kNodesTsv:
                covis::export_nodes(g, cfg.output_dir / "nodes.tsv");
                break;
            case covis::ExportFormat::kDistTsv:
                covis::export_distribution(covis::degree_histogram(g), cfg.output_dir / "degree_dist.tsv");
                covis::export_distribution(covis::weight_histogram(g).first,
                                           cfg.output_dir / "weight_dist.tsv");
                break;
            case covis::ExportFormat::kKnnTsv:
                covis::export_knn(covis::knn_curve(g, mopt.knn_averaging), cfg.output_dir / "knn.tsv");
                break;
            case covis::ExportFormat::kMapTsv:
                covis::export_map_edges(g, cfg, cfg.output_dir / "map_edges.tsv");
                break;
            case covis::ExportFormat::kSummaryJson:
                covis::write_json(covis::summary_report(g, mopt), cfg.output_dir / "summary.json");
                break;
            case covis::ExportFormat::kGraphBinary:
                covis::save_snapshot(g, cfg.output_dir / "graph.covis");
                break;
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// selfcheck: invariant suite over built-in fixtures.

int g_failures = 0;

void check(bool ok, const std::string& name) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", name.c_str());
    if (!ok) ++g_failures;
}

covis::CoVisGraph graph_of(std::vector<covis::WeightedEdge> edges) {
    return covis::CoVisGraph::from_edges(edges);
}

covis::LocationId cell(int idx) {
    return covis::LocationId{idx, 0};
}

int run_selfcheck(std::uint64_t seed) {
    using namespace covis;
    std::mt19937_64 rng(seed);

    // Quantization grid.
    {
        bool ok = quantize(45.1234, 7.6548) == LocationId{45123, 7654} &&
                  quantize(-0.0004, -0.0004) == LocationId{-1, -1} &&
                  quantize(52.0, 13.0) == LocationId{52000, 13000};
        std::uniform_int_distribution<std::int32_t> lat(-90000, 89999), lon(-180000, 179999);
        for (int i = 0; i < 20000 && ok; ++i) {
            const LocationId id{lat(rng), lon(rng)};
            const GeoPoint c = cell_center(id);
            ok = quantize(c.lat, c.lon) == id && LocationId::from_packed(id.packed()) == id;
        }
        check(ok, "quantize: grid examples and center round-trip");
    }

    // Projection on the three-user fixture.
    {
        std::vector<UserVisitSet> visits = {{"a", {cell(1), cell(2)}},
                                            {"b", {cell(1), cell(2)}},
                                            {"c", {cell(2), cell(3)}}};
        BuildStats st;
        const CoVisGraph g = build_from_visits(visits, BuildConfig{}, &st);
        check(g.vertex_count() == 2 && g.edge_count() == 1 && g.edge_weights(0)[0] == 2,
              "builder: weight-2 edge kept, weight-1 edge dropped");
        BuildConfig relaxed;
        relaxed.min_users_per_edge = 1;
        const CoVisGraph g1 = build_from_visits(visits, relaxed, nullptr);
        check(g1.vertex_count() == 3 && g1.edge_count() == 2, "builder: threshold 1 keeps both edges");
    }

    // Randomized projection against a brute-force oracle.
    {
        bool ok = true;
        for (int inst = 0; inst < 25 && ok; ++inst) {
            const int n_users = 2 + static_cast<int>(rng() % 29);
            const int n_cells = 2 + static_cast<int>(rng() % 19);
            std::vector<UserVisitSet> visits;
            std::vector<std::set<int>> sets(n_users);
            for (int u = 0; u < n_users; ++u) {
                const int photos = 1 + static_cast<int>(rng() % 12);
                for (int p = 0; p < photos; ++p) {
                    sets[u].insert(static_cast<int>(rng() % n_cells));
                }
                UserVisitSet vs;
                vs.user_id = "u" + std::to_string(u);
                for (int c : sets[u]) vs.locations.push_back(cell(c));
                visits.push_back(std::move(vs));
            }
            std::vector<WeightedEdge> expect;
            for (int a = 0; a < n_cells; ++a) {
                for (int b = a + 1; b < n_cells; ++b) {
                    std::uint32_t users = 0;
                    for (const auto& s : sets) {
                        if (s.count(a) && s.count(b)) ++users;
                    }
                    if (users >= 2) expect.push_back({cell(a), cell(b), users});
                }
            }
            const CoVisGraph got = build_from_visits(visits, BuildConfig{}, nullptr);
            const CoVisGraph want = CoVisGraph::from_edges(expect);
            ok = got == want;
        }
        check(ok, "builder: matches brute-force pairwise user counts (25 seeded instances)");
    }

    // Closed-form metric values.
    {
        std::vector<WeightedEdge> star;
        for (int i = 1; i <= 5; ++i) star.push_back({cell(0), cell(i), 2});
        const CoVisGraph g = graph_of(star);
        const KnnCurve knn = knn_curve(g);
        const auto r = assortativity(g).r;
        check(knn.points.at(1) == 5.0 && knn.points.at(5) == 1.0 && r && std::abs(*r + 1.0) < 1e-12,
              "metrics: star knn {1:5, 5:1} and r = -1");
        const CoVisGraph tri = graph_of({{cell(0), cell(1), 2}, {cell(0), cell(2), 2}, {cell(1), cell(2), 2}});
        check(!assortativity(tri).r, "metrics: regular graph r undefined");
        const CoVisGraph p4 = graph_of({{cell(0), cell(1), 2}, {cell(1), cell(2), 2}, {cell(2), cell(3), 2}});
        const KnnCurve kp = knn_curve(p4);
        check(kp.points.at(1) == 2.0 && kp.points.at(2) == 1.5, "metrics: P4 knn {1:2.0, 2:1.5}");
    }

    // Structural invariants on random graphs.
    {
        bool ok = true;
        for (int inst = 0; inst < 20 && ok; ++inst) {
            const int n = 3 + static_cast<int>(rng() % 30);
            std::vector<WeightedEdge> edges;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (rng() % 4 == 0) edges.push_back({cell(i), cell(j), 2 + static_cast<std::uint32_t>(rng() % 9)});
                }
            }
            if (edges.empty()) continue;
            const CoVisGraph g = graph_of(edges);
            std::uint64_t deg_sum = 0;
            for (VertexId i = 0; i < g.vertex_count(); ++i) deg_sum += g.degree(i);
            ok = deg_sum == 2 * g.edge_count();
            if (ok) {
                double p_sum = 0;
                for (const auto& [k, c] : degree_histogram(g).entries) {
                    p_sum += static_cast<double>(c) / static_cast<double>(g.vertex_count());
                }
                ok = std::abs(p_sum - 1.0) < 1e-12;
            }
        }
        check(ok, "graph: handshake and degree-distribution normalization (20 seeded instances)");
    }

    std::printf("%s\n", g_failures == 0 ? "selfcheck: all checks passed" : "selfcheck: FAILURES");
    return g_failures == 0 ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"co-visitation network pipeline"};
    app.set_config("--config", "", "Read options from a TOML config file");
    unsigned threads = std::thread::hardware_concurrency();
    app.add_option("--threads", threads, "Worker threads for sorting (output-invariant)")
        ->capture_default_str();

    BuildArgs b;
    CLI::App* build = app.add_subcommand("build", "Parse inputs and build a graph snapshot");
    build->add_option("-i,--input", b.inputs, "Input TSV file (plain or .gz); repeatable")->required();
    build->add_option("-o,--output", b.output, "Output snapshot path")->required();
    build->add_option("--stats", b.stats_path, "Write ingest/build stats JSON here");
    build->add_option("--bbox", b.bbox, "lat_min lat_max lon_min lon_max (default: Europe)")
        ->expected(4);
    build->add_option("--photo-col", b.photo_col, "Photo id column")->capture_default_str();
    build->add_option("--user-col", b.user_col, "User id column")->capture_default_str();
    build->add_option("--lon-col", b.lon_col, "Longitude column")->capture_default_str();
    build->add_option("--lat-col", b.lat_col, "Latitude column")->capture_default_str();
    build->add_option("--delimiter", b.delimiter, "Field delimiter ('tab' or one character)")
        ->capture_default_str();
    build->add_flag("--strict", b.strict, "Make malformed geo values fatal");
    build->add_option("--min-users", b.min_users, "Distinct users required per edge")
        ->capture_default_str();
    build->add_option("--max-locations-per-user", b.max_locations,
                      "Exclude users with more distinct locations (0 = unlimited)");
    build->add_option("--memory-budget-mb", b.memory_budget_mb, "Pair aggregation budget before spilling")
        ->capture_default_str();
    build->add_option("--spill-dir", b.spill_dir, "Directory for spill runs (default: system temp)");

    AnalyzeArgs a;
    CLI::App* analyze = app.add_subcommand("analyze", "Compute metrics from a snapshot");
    analyze->add_option("-s,--snapshot", a.snapshot, "Graph snapshot")->required();
    analyze->add_option("-d,--out-dir", a.out_dir, "Output directory")->required();
    analyze->add_option("--fit-method", a.fit_method, "regression|mle")->capture_default_str();
    analyze->add_option("--xmin", a.x_min, "Fit lower bound (0 = automatic)");
    analyze->add_option("--knn-averaging", a.knn_mode, "per-vertex|pooled")->capture_default_str();

    ExportArgs e;
    CLI::App* exp = app.add_subcommand("export", "Write export files from a snapshot");
    exp->add_option("-s,--snapshot", e.snapshot, "Graph snapshot")->required();
    exp->add_option("-d,--out-dir", e.out_dir, "Output directory")->required();
    exp->add_option("--formats", e.formats,
                    "Comma-separated subset of edge_tsv,nodes_tsv,dist_tsv,knn_tsv,map_tsv,"
                    "summary_json,graph_binary")
        ->required()
        ->delimiter(',');
    exp->add_option("--map-cutoff", e.map_cutoff, "Max endpoint separation (degrees) for map_tsv")
        ->capture_default_str();
    exp->add_option("--map-metric", e.map_metric, "chebyshev|great-circle")->capture_default_str();
    exp->add_option("--fit-method", e.fit_method, "regression|mle (for summary_json)")
        ->capture_default_str();
    exp->add_option("--xmin", e.x_min, "Fit lower bound (0 = automatic)");
    exp->add_option("--knn-averaging", e.knn_mode, "per-vertex|pooled")->capture_default_str();

    std::uint64_t seed = 20240901;
    CLI::App* selfcheck = app.add_subcommand("selfcheck", "Run the invariant suite on built-in fixtures");
    selfcheck->add_option("--seed", seed, "Seed for randomized checks")->capture_default_str();

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kExitConfig;
    }

    try {
        if (*build) return run_build(b, std::max(1u, threads));
        if (*analyze) return run_analyze(a);
        if (*exp) return run_export(e);
        if (*selfcheck) return run_selfcheck(seed);
    } catch (const covis::ConfigError& ex) {
        std::fprintf(stderr, "covis: config error: %s\n", ex.what());
        return kExitConfig;
    } catch (const covis::IoError& ex) {
        std::fprintf(stderr, "covis: %s\n", ex.what());
        return kExitInput;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "covis: internal error: %s\n", ex.what());
        return kExitInternal;
    }
    return kExitOk;
}
