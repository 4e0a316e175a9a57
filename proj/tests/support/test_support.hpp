#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "covis/builder.hpp"
#include "covis/graph.hpp"
#include "covis/metrics.hpp"

namespace covis::test {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("covis-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline LocationId cell(int idx) {
    return LocationId{idx, 0};
}

// Random visit instance plus the raw sets the brute-force oracle consumes.
struct VisitInstance {
    std::vector<UserVisitSet> visits;
    std::vector<std::set<int>> sets;  // per user, cell indices
    int n_cells = 0;
};

inline VisitInstance random_visit_instance(std::mt19937_64& rng, int max_users = 30, int max_cells = 20) {
    VisitInstance inst;
    const int n_users = 1 + static_cast<int>(rng() % max_users);
    inst.n_cells = 2 + static_cast<int>(rng() % (max_cells - 1));
    inst.sets.resize(n_users);
    for (int u = 0; u < n_users; ++u) {
        const int photos = 1 + static_cast<int>(rng() % 15);
        for (int p = 0; p < photos; ++p) {
            inst.sets[u].insert(static_cast<int>(rng() % inst.n_cells));
        }
        UserVisitSet vs;
        vs.user_id = "user" + std::to_string(u);
        for (int c : inst.sets[u]) vs.locations.push_back(cell(c));
        inst.visits.push_back(std::move(vs));
    }
    return inst;
}

// For every location pair, count the users whose visit set contains both,
// then threshold. The oracle the projection must reproduce exactly.
inline std::vector<WeightedEdge> brute_force_covis(const VisitInstance& inst, std::uint32_t min_users) {
    std::vector<WeightedEdge> edges;
    for (int a = 0; a < inst.n_cells; ++a) {
        for (int b = a + 1; b < inst.n_cells; ++b) {
            std::uint32_t users = 0;
            for (const auto& s : inst.sets) {
                if (s.count(a) > 0 && s.count(b) > 0) ++users;
            }
            if (users >= min_users) {
                edges.push_back(WeightedEdge{cell(a), cell(b), users});
            }
        }
    }
    return edges;
}

// Erdos-Renyi-style graph over cells 0..n-1; guaranteed at least one edge.
inline CoVisGraph random_graph(std::mt19937_64& rng, int max_n = 40, double p = 0.2) {
    while (true) {
        const int n = 2 + static_cast<int>(rng() % (max_n - 1));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::vector<WeightedEdge> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (coin(rng) < p) {
                    edges.push_back(WeightedEdge{cell(i), cell(j), 2 + static_cast<std::uint32_t>(rng() % 9)});
                }
            }
        }
        if (!edges.empty()) {
            return CoVisGraph::from_edges(edges);
        }
    }
}

// Independent two-pass Pearson over the 2M directed endpoint pairs, with an
// optional uniform shift of the degrees (shift = -1 gives remaining degrees).
inline std::optional<double> pearson_endpoint_pairs(const CoVisGraph& g, int shift = 0) {
    std::vector<double> xs, ys;
    g.for_each_edge([&](VertexId u, VertexId v, std::uint32_t) {
        const double du = static_cast<double>(g.degree(u)) + shift;
        const double dv = static_cast<double>(g.degree(v)) + shift;
        xs.push_back(du);
        ys.push_back(dv);
        xs.push_back(dv);
        ys.push_back(du);
    });
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (xs[i] - mx) * (ys[i] - my);
        vx += (xs[i] - mx) * (xs[i] - mx);
        vy += (ys[i] - my) * (ys[i] - my);
    }
    if (vx == 0 || vy == 0) {
        return std::nullopt;
    }
    return cov / std::sqrt(vx * vy);
}

// Analytic power-law histogram: count(k) = round(C * k^-theta), k = 1..kmax.
inline Histogram analytic_power_histogram(double theta, double C = 1e8, std::uint64_t kmax = 10000) {
    Histogram h;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
        const auto c = static_cast<std::uint64_t>(std::llround(C * std::pow(static_cast<double>(k), -theta)));
        if (c >= 1) {
            h.entries[k] = c;
            h.total += c;
        }
    }
    return h;
}

// Seeded sampler for the discrete power law p_k ~ k^-alpha, k >= x_min.
// Inverse-CDF on a direct partial-sum table; the rare draw beyond the table
// extends the sum term by term. Independent of the fitter's zeta path.
class DiscretePowerLawSampler {
public:
    DiscretePowerLawSampler(double alpha, std::uint64_t x_min, std::uint64_t table_size = 200000)
        : alpha_(alpha), x_min_(x_min) {
        cdf_.reserve(table_size);
        double cum = 0.0;
        for (std::uint64_t k = x_min; k < x_min + table_size; ++k) {
            cum += std::pow(static_cast<double>(k), -alpha);
            cdf_.push_back(cum);
        }
        // Total mass: table + integral tail with endpoint correction.
        const double b = static_cast<double>(x_min + table_size);
        total_ = cum + std::pow(b, 1.0 - alpha) / (alpha - 1.0) + 0.5 * std::pow(b, -alpha);
    }

    std::uint64_t operator()(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> uni(0.0, total_);
        const double u = uni(rng);
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it != cdf_.end()) {
            return x_min_ + static_cast<std::uint64_t>(it - cdf_.begin());
        }
        double cum = cdf_.back();
        std::uint64_t k = x_min_ + cdf_.size();
        while (cum < u) {
            cum += std::pow(static_cast<double>(k), -alpha_);
            ++k;
        }
        return k - 1;
    }

    Histogram sample_histogram(std::mt19937_64& rng, std::uint64_t n) const {
        Histogram h;
        for (std::uint64_t i = 0; i < n; ++i) {
            ++h.entries[(*this)(rng)];
        }
        h.total = n;
        return h;
    }

private:
    double alpha_;
    std::uint64_t x_min_;
    std::vector<double> cdf_;
    double total_ = 0.0;
};

}  // namespace covis::test
