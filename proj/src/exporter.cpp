#include "covis/exporter.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include "covis/errors.hpp"

namespace covis {

void ExportConfig::validate() const {
    if (!(map_max_separation_deg > 0)) {
        throw ConfigError("map_max_separation_deg must be > 0");
    }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

double central_angle_deg(GeoPoint a, GeoPoint b) {
    constexpr double d2r = std::numbers::pi / 180.0;
    const double s_lat = std::sin((b.lat - a.lat) * d2r / 2);
    const double s_lon = std::sin((b.lon - a.lon) * d2r / 2);
    const double h = s_lat * s_lat + std::cos(a.lat * d2r) * std::cos(b.lat * d2r) * s_lon * s_lon;
    return 2.0 * std::asin(std::min(1.0, std::sqrt(h))) / d2r;
}

}  // namespace

void export_edges(const CoVisGraph& g, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# u_lat_milli\tu_lon_milli\tv_lat_milli\tv_lon_milli\tweight\n";
    g.for_each_edge([&](VertexId u, VertexId v, std::uint32_t w) {
        const LocationId lu = g.location(u);
        const LocationId lv = g.location(v);
        out << lu.lat_milli << '\t' << lu.lon_milli << '\t' << lv.lat_milli << '\t' << lv.lon_milli << '\t'
            << w << '\n';
    });
    finish_out(out, path);
}

std::vector<WeightedEdge> import_edge_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open edge TSV: " + path.string());
    }
    std::vector<WeightedEdge> edges;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        long long f[5];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < 5; ++i) {
            auto [next, ec] = std::from_chars(p, end, f[i]);
            const bool delim_ok = i < 4 ? (next != end && *next == '\t') : next == end;
            if (ec != std::errc() || !delim_ok) {
                throw IoError("malformed edge TSV at " + path.string() + ":" + std::to_string(line_no));
            }
            p = next < end ? next + 1 : next;
        }
        edges.push_back(WeightedEdge{
            LocationId{static_cast<std::int32_t>(f[0]), static_cast<std::int32_t>(f[1])},
            LocationId{static_cast<std::int32_t>(f[2]), static_cast<std::int32_t>(f[3])},
            static_cast<std::uint32_t>(f[4])});
    }
    return edges;
}

void export_nodes(const CoVisGraph& g, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# lat_milli\tlon_milli\tdegree\n";
    for (VertexId i = 0; i < g.vertex_count(); ++i) {
        const LocationId id = g.location(i);
        out << id.lat_milli << '\t' << id.lon_milli << '\t' << g.degree(i) << '\n';
    }
    finish_out(out, path);
}

void export_distribution(const Histogram& h, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# value\tcount\tprobability\n";
    for (const auto& [value, count] : h.entries) {
        out << value << '\t' << count << '\t'
            << fmt(static_cast<double>(count) / static_cast<double>(h.total)) << '\n';
    }
    finish_out(out, path);
}

void export_knn(const KnnCurve& curve, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# k\tknn_avg\n";
    for (const auto& [k, avg] : curve.points) {
        out << k << '\t' << fmt(avg) << '\n';
    }
    finish_out(out, path);
}

void export_map_edges(const CoVisGraph& g, const ExportConfig& cfg, const std::filesystem::path& path) {
    cfg.validate();
    std::ofstream out = open_out(path);
    out << "# u_lat\tu_lon\tv_lat\tv_lon\tweight\n";
    g.for_each_edge([&](VertexId u, VertexId v, std::uint32_t w) {
        const GeoPoint a = cell_center(g.location(u));
        const GeoPoint b = cell_center(g.location(v));
        const double sep = cfg.map_metric == MapMetric::kChebyshev
                               ? std::max(std::abs(a.lat - b.lat), std::abs(a.lon - b.lon))
                               : central_angle_deg(a, b);
        if (sep < cfg.map_max_separation_deg) {
            out << fmt_coord(a.lat) << '\t' << fmt_coord(a.lon) << '\t' << fmt_coord(b.lat) << '\t'
                << fmt_coord(b.lon) << '\t' << w << '\n';
        }
    });
    finish_out(out, path);
}

namespace {

nlohmann::json fit_to_json(const PowerLawFit& fit) {
    nlohmann::json j;
    j["exponent"] = fit.exponent;
    j["method"] = fit.method == FitMethod::kLogBinRegression ? "log_binned_regression" : "discrete_mle";
    j["x_min"] = fit.x_min;
    if (fit.method == FitMethod::kLogBinRegression) {
        j["r_squared"] = fit.goodness;
    } else {
        j["mean_log_likelihood"] = fit.goodness;
        j["ks_distance"] = fit.ks_distance.value_or(0.0);
    }
    j["n_points"] = fit.n_points;
    j["quality_warning"] = fit.quality_warning;
    return j;
}

}  // namespace

nlohmann::json summary_report(const CoVisGraph& g, const MetricsOptions& opt) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["N"] = g.vertex_count();
    j["M"] = g.edge_count();

    const ComponentReport comp = components(g);
    nlohmann::json jc;
    jc["count"] = comp.component_count;
    jc["giant_size"] = comp.giant_size;
    jc["giant_fraction"] = comp.giant_fraction;
    std::map<std::uint64_t, std::uint64_t> size_counts;
    for (std::uint64_t s : comp.sizes) ++size_counts[s];
    nlohmann::json jsizes = nlohmann::json::object();
    for (const auto& [size, count] : size_counts) {
        jsizes[std::to_string(size)] = count;
    }
    jc["size_counts"] = jsizes;
    j["components"] = jc;

    if (g.edge_count() > 0) {
        const auto [wh, wstats] = weight_histogram(g);
        j["weight_stats"] = {{"min", wstats.min}, {"max", wstats.max}, {"mean", wstats.mean}};
        try {
            j["gamma_fit"] = fit_to_json(fit_power_law(wh, opt.fit_method, opt.x_min));
        } catch (const MetricError&) {
            j["gamma_fit"] = nullptr;
        }
    } else {
        j["weight_stats"] = nullptr;
        j["gamma_fit"] = nullptr;
    }

    if (g.vertex_count() > 0) {
        const Histogram dh = degree_histogram(g);
        try {
            j["theta_fit"] = fit_to_json(fit_power_law(dh, opt.fit_method, opt.x_min));
        } catch (const MetricError&) {
            j["theta_fit"] = nullptr;
        }
    } else {
        j["theta_fit"] = nullptr;
    }

    if (g.edge_count() > 0) {
        const AssortativityResult a = assortativity(g);
        if (a.r) {
            j["r"] = *a.r;
        } else {
            j["r"] = "undefined";
        }
    } else {
        j["r"] = "undefined";
    }
    return j;
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    finish_out(out, path);
}

}  // namespace covis
