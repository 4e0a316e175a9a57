#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "covis/geo.hpp"
#include "covis/graph.hpp"
#include "covis/quantize.hpp"

namespace covis {

/// The distinct cells one user photographed, sorted by packed key.
/// A user contributes a cell once no matter how many photos they took there.
struct UserVisitSet {
    std::string user_id;
    std::vector<LocationId> locations;  // strictly sorted, no duplicates
};

struct BuildConfig {
    // An edge survives when at least this many distinct users visited both
    // endpoints.
    std::uint32_t min_users_per_edge = 2;
    // Users with more distinct locations than this are excluded entirely
    // (never truncated) and counted in the stats.
    std::optional<std::uint32_t> max_locations_per_user;
    // Pair-aggregation buffer cap; emitting past it spills a sorted run to
    // disk, keeping memory bounded for arbitrarily large inputs.
    std::uint64_t memory_budget_bytes = 1ull << 30;
    std::filesystem::path spill_dir;  // empty: system temp dir
    unsigned threads = 1;             // sort parallelism; never changes output
};

struct BuildStats {
    std::uint64_t users = 0;
    std::uint64_t users_capped = 0;
    std::uint64_t distinct_locations_seen = 0;
    std::uint64_t pairs_emitted = 0;
    std::uint64_t edges_kept = 0;
    std::uint64_t spill_runs = 0;
    std::uint64_t n_vertices = 0;
    std::uint64_t m_edges = 0;

    friend bool operator==(const BuildStats&, const BuildStats&) = default;
};

/// Accumulates (user, location) observations and hands out deduplicated
/// visit sets.
class VisitCollector {
public:
    void add(const PhotoRecord& rec);
    void add(const std::string& user_id, LocationId cell);

    /// Returns one UserVisitSet per user, sorted by user id, each location
    /// list sorted and deduplicated. The collector is left empty.
    std::vector<UserVisitSet> take();

private:
    std::unordered_map<std::string, std::vector<std::uint64_t>> visits_;
};

std::vector<UserVisitSet> collect_visits(std::span<const PhotoRecord> records);

/// Emits all C(n,2) unordered location pairs of one user in canonical
/// (u < v) order. Nothing for n <= 1; never a self-pair.
template <typename Sink>  // void(LocationId u, LocationId v)
void emit_pairs(const UserVisitSet& visits, Sink&& sink) {
    const auto& loc = visits.locations;
    for (std::size_t i = 0; i < loc.size(); ++i) {
        for (std::size_t j = i + 1; j < loc.size(); ++j) {
            sink(loc[i], loc[j]);
        }
    }
}

/// Counts canonical pairs with bounded memory. Pairs stream in via add();
/// when the in-memory buffer hits the budget it is sorted, aggregated and
/// spilled as a binary run (sorted (u:64, v:64, count:32) little-endian
/// triples). finish() merge-sorts the runs, sums counts per pair, filters
/// by the user threshold and returns the surviving edges in canonical
/// order. Deterministic regardless of input order, sharding or thread
/// count.
class PairAggregator {
public:
    explicit PairAggregator(const BuildConfig& cfg);
    ~PairAggregator();

    PairAggregator(const PairAggregator&) = delete;
    PairAggregator& operator=(const PairAggregator&) = delete;

    void add(LocationId u, LocationId v) {
        buffer_.push_back({u.packed(), v.packed()});
        if (buffer_.size() >= buffer_cap_) {
            spill_run();
        }
    }

    std::vector<WeightedEdge> finish();

    std::uint64_t spill_run_count() const { return run_paths_.size(); }

private:
    struct PackedPair {
        std::uint64_t u;
        std::uint64_t v;
        friend bool operator==(const PackedPair&, const PackedPair&) = default;
        friend auto operator<=>(const PackedPair&, const PackedPair&) = default;
    };

    void spill_run();
    void sort_buffer();

    BuildConfig cfg_;
    std::size_t buffer_cap_;
    std::vector<PackedPair> buffer_;
    std::vector<std::filesystem::path> run_paths_;
};

/// Full projection from deduplicated visit sets: pair emission,
/// aggregation, thresholding, graph construction. Locations with no
/// surviving edge are absent from the result.
CoVisGraph build_from_visits(std::vector<UserVisitSet> visits, const BuildConfig& cfg,
                             BuildStats* stats = nullptr);

/// Convenience composition over raw records.
CoVisGraph build_graph(std::span<const PhotoRecord> records, const BuildConfig& cfg,
                       BuildStats* stats = nullptr);

}  // namespace covis
