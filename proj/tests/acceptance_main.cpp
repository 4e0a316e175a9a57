// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] is the committed 12-line fixture TSV.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "covis/builder.hpp"
#include "covis/exporter.hpp"
#include "covis/graph.hpp"
#include "covis/metrics.hpp"
#include "covis/pipeline.hpp"
#include "support/test_support.hpp"

using namespace covis;
using covis::test::cell;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion {
    int number;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Criterion> g_results;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    g_results.push_back({number, name, pass, detail});
}

// Criterion 7 bookkeeping: every graph any criterion touches goes through
// here.
std::uint64_t g_graphs_checked = 0;
std::uint64_t g_invariant_violations = 0;

void check_invariants(const CoVisGraph& g) {
    ++g_graphs_checked;
    std::uint64_t deg_sum = 0;
    for (VertexId i = 0; i < g.vertex_count(); ++i) deg_sum += g.degree(i);
    if (deg_sum != 2 * g.edge_count()) {
        ++g_invariant_violations;
        return;
    }
    if (g.vertex_count() > 0) {
        double p_sum = 0;
        const Histogram h = degree_histogram(g);
        for (const auto& [k, c] : h.entries) p_sum += static_cast<double>(c) / static_cast<double>(h.total);
        if (std::abs(p_sum - 1.0) > 1e-12) {
            ++g_invariant_violations;
            return;
        }
    }
    if (g.edge_count() > 0) {
        double p_sum = 0;
        const Histogram h = weight_histogram(g).first;
        for (const auto& [w, c] : h.entries) p_sum += static_cast<double>(c) / static_cast<double>(h.total);
        if (std::abs(p_sum - 1.0) > 1e-12) {
            ++g_invariant_violations;
        }
    }
}

// --- criteria 1 + 2: oracle equivalence and threshold semantics ----------

void run_oracle_and_threshold() {
    const auto start = Clock::now();
    std::mt19937_64 rng(0xC0115EED);
    int mismatches = 0;
    int threshold_violations = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const auto instance = covis::test::random_visit_instance(rng, 30, 20);
        const CoVisGraph got = build_from_visits(instance.visits, BuildConfig{}, nullptr);
        const CoVisGraph want = CoVisGraph::from_edges(covis::test::brute_force_covis(instance, 2));
        if (!(got == want)) ++mismatches;
        check_invariants(got);

        got.for_each_edge([&](VertexId u, VertexId v, std::uint32_t w) {
            if (w < 2) ++threshold_violations;
            // recount contributing users independently
            std::uint32_t users = 0;
            const int a = got.location(u).lat_milli;
            const int b = got.location(v).lat_milli;
            for (const auto& s : instance.sets) {
                if (s.count(a) > 0 && s.count(b) > 0) ++users;
            }
            if (users != w || users < 2) ++threshold_violations;
        });
    }
    const double secs = seconds_since(start);
    report(1, "oracle equivalence on 200 randomized instances",
           mismatches == 0 && secs < 10.0,
           mismatches == 0 ? "all instances exact, " + std::to_string(secs) + " s"
                           : std::to_string(mismatches) + " mismatching instances");
    report(2, "threshold semantics: every surviving edge has >= 2 distinct users",
           threshold_violations == 0,
           threshold_violations == 0 ? "weights equal recounted distinct users, min >= 2"
                                     : std::to_string(threshold_violations) + " violations");
}

// --- criterion 3: determinism over input permutations ---------------------

void run_determinism(const std::filesystem::path& fixture) {
    covis::test::TempDir tmp;
    const std::string content = covis::test::read_file(fixture);
    std::vector<std::string> lines;
    for (std::size_t pos = 0; pos < content.size();) {
        const std::size_t nl = content.find('\n', pos);
        lines.push_back(content.substr(pos, nl - pos));
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }

    auto build_bytes = [&](const std::vector<std::string>& ls, int tag, std::string& snapshot_bytes,
                           std::string& summary_bytes) {
        const auto input = tmp.file("perm" + std::to_string(tag) + ".tsv");
        std::string joined;
        for (const auto& l : ls) joined += l + "\n";
        covis::test::write_file(input, joined);
        const PipelineResult res = build_from_files({input}, IngestOptions{}, BuildConfig{});
        const auto snap = tmp.file("perm" + std::to_string(tag) + ".covis");
        save_snapshot(res.graph, snap);
        snapshot_bytes = covis::test::read_file(snap);
        summary_bytes = summary_report(res.graph, MetricsOptions{}).dump(2);
        check_invariants(res.graph);
    };

    std::string base_snap, base_summary;
    build_bytes(lines, 0, base_snap, base_summary);

    std::mt19937_64 rng(0xD37E12);
    int diffs = 0;
    for (int perm = 1; perm <= 20; ++perm) {
        std::vector<std::string> shuffled = lines;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::string snap, summary;
        build_bytes(shuffled, perm, snap, summary);
        if (snap != base_snap || summary != base_summary) ++diffs;
    }
    report(3, "determinism: 20 fixture permutations give byte-identical outputs", diffs == 0,
           diffs == 0 ? "snapshots and summaries identical" : std::to_string(diffs) + " permutations differ");
}

// --- criterion 4: closed-form metric values -------------------------------

void run_closed_form() {
    bool ok = true;
    std::string detail = "star r/knn, regular r, P4 knn all exact";

    for (int n : {3, 6, 9}) {
        std::vector<WeightedEdge> edges;
        for (int i = 1; i < n; ++i) edges.push_back({cell(0), cell(i), 2});
        const CoVisGraph g = CoVisGraph::from_edges(edges);
        check_invariants(g);
        const auto r = assortativity(g).r;
        const KnnCurve knn = knn_curve(g);
        if (!r || std::abs(*r + 1.0) > 1e-12) ok = false;
        if (std::abs(knn.points.at(1) - static_cast<double>(n - 1)) > 1e-12) ok = false;
        if (std::abs(knn.points.at(n - 1) - 1.0) > 1e-12) ok = false;
    }

    // regular graphs: triangle, C5, K4
    std::vector<std::vector<WeightedEdge>> regulars;
    regulars.push_back({{cell(0), cell(1), 2}, {cell(0), cell(2), 2}, {cell(1), cell(2), 2}});
    regulars.push_back({{cell(0), cell(1), 2},
                        {cell(0), cell(4), 2},
                        {cell(1), cell(2), 2},
                        {cell(2), cell(3), 2},
                        {cell(3), cell(4), 2}});
    {
        std::vector<WeightedEdge> k4;
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) k4.push_back({cell(i), cell(j), 2});
        }
        regulars.push_back(k4);
    }
    for (const auto& edges : regulars) {
        const CoVisGraph g = CoVisGraph::from_edges(edges);
        check_invariants(g);
        if (assortativity(g).r.has_value()) ok = false;
    }

    const CoVisGraph p4 = CoVisGraph::from_edges(
        std::vector<WeightedEdge>{{cell(0), cell(1), 2}, {cell(1), cell(2), 2}, {cell(2), cell(3), 2}});
    check_invariants(p4);
    const KnnCurve kp = knn_curve(p4);
    if (std::abs(kp.points.at(1) - 2.0) > 1e-12 || std::abs(kp.points.at(2) - 1.5) > 1e-12) ok = false;

    if (!ok) detail = "a closed-form value deviated beyond 1e-12";
    report(4, "closed-form metrics: star, regular graphs, P4", ok, detail);
}

// --- criterion 5: Eq.(2)/(3) equivalence ----------------------------------

void run_shift_equivalence() {
    std::mt19937_64 rng(0x517F7);
    int failures = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const CoVisGraph g = covis::test::random_graph(rng);
        check_invariants(g);
        const auto full = covis::test::pearson_endpoint_pairs(g, 0);
        const auto remaining = covis::test::pearson_endpoint_pairs(g, -1);
        const auto impl = assortativity(g).r;
        if (full.has_value() != remaining.has_value() || full.has_value() != impl.has_value()) {
            ++failures;
            continue;
        }
        if (full && (std::abs(*full - *remaining) > 1e-12 || std::abs(*impl - *full) > 1e-12)) {
            ++failures;
        }
        double q_sum = 0;
        for (const auto& [k, v] : remaining_degree_distribution(degree_histogram(g))) q_sum += v;
        if (std::abs(q_sum - 1.0) > 1e-12) ++failures;
    }
    report(5, "full-degree Pearson = remaining-degree Pearson; q_k sums to 1", failures == 0,
           failures == 0 ? "100 random graphs within 1e-12" : std::to_string(failures) + " failures");
}

// --- criterion 6: planted power-law recovery -------------------------------

void run_planted_recovery() {
    const auto start = Clock::now();
    const covis::test::DiscretePowerLawSampler sampler(2.89, 2);
    std::mt19937_64 rng(0xACCE97);
    const Histogram sampled = sampler.sample_histogram(rng, 100000);
    const PowerLawFit mle = fit_power_law(sampled, FitMethod::kDiscreteMle, 2);

    const Histogram analytic = covis::test::analytic_power_histogram(2.0);
    const PowerLawFit reg = fit_power_law(analytic, FitMethod::kLogBinRegression);

    const double secs = seconds_since(start);
    const bool ok = std::abs(mle.exponent - 2.89) < 0.1 && std::abs(reg.exponent - 2.0) < 0.05 && secs < 5.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "mle=%.4f (target 2.89 +/- 0.1), regression=%.4f (target 2.0 +/- 0.05), %.2f s",
                  mle.exponent, reg.exponent, secs);
    report(6, "planted power-law exponent recovery", ok, buf);
}

// --- criterion 8: scale smoke with spill path ------------------------------

std::vector<PhotoRecord> synthetic_records(std::uint64_t n_records, std::uint64_t n_users,
                                           std::uint64_t seed) {
    // 150 cluster pools of 400 millidegree cells each; a user draws 50..75
    // distinct cells from one pool and spreads 100 photos over them. This
    // makes per-user pair emission heavy enough to overflow a 256 MB buffer
    // while keeping the aggregated pair space clustered.
    std::mt19937_64 rng(seed);
    constexpr int kClusters = 150;
    constexpr int kPoolSide = 20;  // 20x20 = 400 cells per cluster
    std::vector<PhotoRecord> records;
    records.reserve(n_records);
    const std::uint64_t photos_per_user = n_records / n_users;

    for (std::uint64_t u = 0; u < n_users; ++u) {
        const int cl = static_cast<int>(rng() % kClusters);
        const double base_lat = 36.0 + 2.0 * (cl % 15);   // 36..64
        const double base_lon = -18.0 + 4.0 * (cl / 15);  // -18..18
        const std::uint64_t distinct = 50 + rng() % 26;

        std::vector<int> pool(kPoolSide * kPoolSide);
        for (int i = 0; i < static_cast<int>(pool.size()); ++i) pool[i] = i;
        for (std::uint64_t i = 0; i < distinct; ++i) {  // partial Fisher-Yates
            std::swap(pool[i], pool[i + rng() % (pool.size() - i)]);
        }
        const std::string user = "u" + std::to_string(u);
        auto cell_point = [&](int idx) {
            return std::pair{base_lat + 1e-3 * (idx % kPoolSide) + 5e-4,
                             base_lon + 1e-3 * (idx / kPoolSide) + 5e-4};
        };
        for (std::uint64_t p = 0; p < photos_per_user; ++p) {
            const int idx = pool[p < distinct ? p : rng() % distinct];
            const auto [lat, lon] = cell_point(idx);
            records.push_back(PhotoRecord{"p", user, lon, lat});
        }
    }
    return records;
}

CoVisGraph g_scale_graph;  // shared with criterion 9

void run_scale_smoke() {
    const std::uint64_t n_records = 1000000, n_users = 10000;
    std::vector<PhotoRecord> records = synthetic_records(n_records, n_users, 0x5CA1E);

    BuildConfig spill_cfg;
    spill_cfg.memory_budget_bytes = 256ull << 20;
    spill_cfg.threads = 4;
    const auto start = Clock::now();
    BuildStats spill_stats;
    CoVisGraph spilled = build_graph(records, spill_cfg, &spill_stats);
    const double secs = seconds_since(start);
    check_invariants(spilled);

    BuildConfig mem_cfg;
    mem_cfg.memory_budget_bytes = 8ull << 30;
    mem_cfg.threads = 4;
    BuildStats mem_stats;
    const CoVisGraph in_memory = build_graph(records, mem_cfg, &mem_stats);
    records.clear();
    records.shrink_to_fit();

    const bool spilled_path_used = spill_stats.spill_runs >= 2 && mem_stats.spill_runs == 0;
    const bool equal = spilled == in_memory;
    const bool ok = spilled_path_used && equal && secs < 60.0 && spilled.vertex_count() > 0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "N=%llu M=%llu, %llu spill runs, %.1f s (budget 256 MB); spill == in-memory: %s",
                  static_cast<unsigned long long>(spilled.vertex_count()),
                  static_cast<unsigned long long>(spilled.edge_count()),
                  static_cast<unsigned long long>(spill_stats.spill_runs), secs, equal ? "yes" : "NO");
    report(8, "scale smoke: 1e6 records / 1e4 users through the spill path", ok, buf);
    g_scale_graph = std::move(spilled);
}

// --- criterion 9: snapshot -> edge TSV -> rebuild --------------------------

void run_round_trip(const std::filesystem::path& fixture) {
    covis::test::TempDir tmp;
    bool ok = true;
    std::string detail = "fixture and synthetic graphs rebuilt identically";

    const PipelineResult fix = build_from_files({fixture}, IngestOptions{}, BuildConfig{});
    check_invariants(fix.graph);

    int idx = 0;
    const std::vector<const CoVisGraph*> graphs{&fix.graph, &g_scale_graph};
    for (const CoVisGraph* g : graphs) {
        const auto snap_path = tmp.file("roundtrip" + std::to_string(idx) + ".covis");
        save_snapshot(*g, snap_path);
        const CoVisGraph loaded = load_snapshot(snap_path);
        const auto tsv_path = tmp.file("roundtrip" + std::to_string(idx) + ".tsv");
        export_edges(loaded, tsv_path);
        const CoVisGraph rebuilt = CoVisGraph::from_edges(import_edge_tsv(tsv_path));
        if (!(rebuilt == *g)) {
            ok = false;
            detail = "rebuilt graph " + std::to_string(idx) + " differs";
        }
        ++idx;
    }
    report(9, "round-trip: snapshot -> edge TSV -> identical graph", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <fixture.tsv>\n");
        return 2;
    }
    const std::filesystem::path fixture = argv[1];

    run_oracle_and_threshold();
    run_determinism(fixture);
    run_closed_form();
    run_shift_equivalence();
    run_planted_recovery();
    run_scale_smoke();
    run_round_trip(fixture);

    report(7, "handshake and normalization invariants on every graph in the suite",
           g_invariant_violations == 0 && g_graphs_checked > 300,
           std::to_string(g_graphs_checked) + " graphs checked, " +
               std::to_string(g_invariant_violations) + " violations");

    std::sort(g_results.begin(), g_results.end(),
              [](const Criterion& a, const Criterion& b) { return a.number < b.number; });
    int failures = 0;
    for (const Criterion& c : g_results) {
        std::printf("[%s] %d. %s: %s\n", c.pass ? "PASS" : "FAIL", c.number, c.name.c_str(),
                    c.detail.c_str());
        if (!c.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
