#include "covis/builder.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "covis/errors.hpp"

namespace covis {

void VisitCollector::add(const PhotoRecord& rec) {
    visits_[rec.user_id].push_back(quantize(rec.lat, rec.lon).packed());
}

void VisitCollector::add(const std::string& user_id, LocationId cell) {
    visits_[user_id].push_back(cell.packed());
}

std::vector<UserVisitSet> VisitCollector::take() {
    std::vector<UserVisitSet> out;
    out.reserve(visits_.size());
    for (auto& [user, keys] : visits_) {
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        UserVisitSet set;
        set.user_id = user;
        set.locations.reserve(keys.size());
        for (std::uint64_t k : keys) {
            set.locations.push_back(LocationId::from_packed(k));
        }
        out.push_back(std::move(set));
    }
    visits_.clear();
    // Sorted by user id so downstream emission order is a function of the
    // input content only, never of hash-map iteration order.
    std::sort(out.begin(), out.end(),
              [](const UserVisitSet& a, const UserVisitSet& b) { return a.user_id < b.user_id; });
    return out;
}

std::vector<UserVisitSet> collect_visits(std::span<const PhotoRecord> records) {
    VisitCollector col;
    for (const PhotoRecord& rec : records) {
        col.add(rec);
    }
    return col.take();
}

namespace {

constexpr std::size_t kRunRecordBytes = 20;  // u:8 + v:8 + count:4
constexpr std::size_t kRunIoBufferRecords = 1 << 16;

void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}
std::uint32_t read_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

// Buffered sequential reader over one sorted spill run.
class RunReader {
public:
    explicit RunReader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) {
            throw IoError("cannot open spill run: " + path.string());
        }
        refill();
    }

    bool exhausted() const { return pos_ >= buf_.size() && eof_; }
    std::uint64_t u() const { return read_u64(buf_.data() + pos_); }
    std::uint64_t v() const { return read_u64(buf_.data() + pos_ + 8); }
    std::uint32_t count() const { return read_u32(buf_.data() + pos_ + 16); }

    void advance() {
        pos_ += kRunRecordBytes;
        if (pos_ >= buf_.size() && !eof_) {
            refill();
        }
    }

private:
    void refill() {
        buf_.resize(kRunRecordBytes * kRunIoBufferRecords);
        in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (in_.bad() || got % kRunRecordBytes != 0) {
            throw IoError("spill run corrupt or unreadable: " + path_.string());
        }
        buf_.resize(got);
        pos_ = 0;
        eof_ = got == 0 || in_.eof();
    }

    std::ifstream in_;
    std::filesystem::path path_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    bool eof_ = false;
};

}  // namespace

PairAggregator::PairAggregator(const BuildConfig& cfg) : cfg_(cfg) {
    if (cfg.min_users_per_edge < 1) {
        throw ConfigError("min_users_per_edge must be >= 1");
    }
    buffer_cap_ = std::max<std::size_t>(4096, cfg.memory_budget_bytes / sizeof(PackedPair));
    if (cfg_.spill_dir.empty()) {
        cfg_.spill_dir = std::filesystem::temp_directory_path();
    }
}

PairAggregator::~PairAggregator() {
    std::error_code ec;
    for (const auto& p : run_paths_) {
        std::filesystem::remove(p, ec);
    }
}

void PairAggregator::sort_buffer() {
    const unsigned threads = std::max(1u, cfg_.threads);
    if (threads == 1 || buffer_.size() < (1u << 16)) {
        std::sort(buffer_.begin(), buffer_.end());
        return;
    }
    // Chunk sort + pairwise merge; the result is the unique sorted
    // permutation, so the thread count cannot affect output.
    const std::size_t chunks = std::min<std::size_t>(threads, 16);
    std::vector<std::size_t> bounds(chunks + 1);
    for (std::size_t i = 0; i <= chunks; ++i) {
        bounds[i] = buffer_.size() * i / chunks;
    }
    std::vector<std::thread> workers;
    workers.reserve(chunks);
    for (std::size_t i = 0; i < chunks; ++i) {
        workers.emplace_back([this, &bounds, i] {
            std::sort(buffer_.begin() + bounds[i], buffer_.begin() + bounds[i + 1]);
        });
    }
    for (auto& w : workers) w.join();
    for (std::size_t width = 1; width < chunks; width *= 2) {
        for (std::size_t i = 0; i + width <= chunks; i += 2 * width) {
            const std::size_t hi = std::min(i + 2 * width, chunks);
            std::inplace_merge(buffer_.begin() + bounds[i], buffer_.begin() + bounds[i + width],
                               buffer_.begin() + bounds[hi]);
        }
    }
}

void PairAggregator::spill_run() {
    sort_buffer();
    static std::atomic<std::uint64_t> next_run_id{0};
    const std::uint64_t seq = next_run_id.fetch_add(1);
    std::filesystem::path path =
        cfg_.spill_dir / ("covis-spill-" + std::to_string(::getpid()) + "-" + std::to_string(seq) + ".run");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create spill run: " + path.string());
    }
    std::string io;
    io.reserve(kRunRecordBytes * kRunIoBufferRecords);
    std::size_t i = 0;
    while (i < buffer_.size()) {
        std::size_t j = i + 1;
        while (j < buffer_.size() && buffer_[j] == buffer_[i]) ++j;
        append_u64(io, buffer_[i].u);
        append_u64(io, buffer_[i].v);
        append_u32(io, static_cast<std::uint32_t>(j - i));
        if (io.size() >= kRunRecordBytes * kRunIoBufferRecords) {
            out.write(io.data(), static_cast<std::streamsize>(io.size()));
            io.clear();
        }
        i = j;
    }
    out.write(io.data(), static_cast<std::streamsize>(io.size()));
    if (!out) {
        throw IoError("write failed on spill run: " + path.string());
    }
    run_paths_.push_back(std::move(path));
    buffer_.clear();
}

std::vector<WeightedEdge> PairAggregator::finish() {
    std::vector<WeightedEdge> edges;
    const std::uint32_t min_users = cfg_.min_users_per_edge;
    auto keep = [&](std::uint64_t u, std::uint64_t v, std::uint64_t count) {
        if (count >= min_users) {
            edges.push_back(WeightedEdge{LocationId::from_packed(u), LocationId::from_packed(v),
                                         static_cast<std::uint32_t>(count)});
        }
    };

    if (run_paths_.empty()) {
        sort_buffer();
        std::size_t i = 0;
        while (i < buffer_.size()) {
            std::size_t j = i + 1;
            while (j < buffer_.size() && buffer_[j] == buffer_[i]) ++j;
            keep(buffer_[i].u, buffer_[i].v, j - i);
            i = j;
        }
        buffer_.clear();
        buffer_.shrink_to_fit();
        return edges;
    }

    if (!buffer_.empty()) {
        spill_run();
    }
    std::vector<RunReader> readers;
    readers.reserve(run_paths_.size());
    for (const auto& p : run_paths_) {
        readers.emplace_back(p);
    }
    // Few runs in practice, so a linear min-scan beats heap bookkeeping.
    while (true) {
        std::uint64_t best_u = 0, best_v = 0;
        bool any = false;
        for (const RunReader& r : readers) {
            if (r.exhausted()) continue;
            if (!any || std::pair{r.u(), r.v()} < std::pair{best_u, best_v}) {
                best_u = r.u();
                best_v = r.v();
                any = true;
            }
        }
        if (!any) break;
        std::uint64_t total = 0;
        for (RunReader& r : readers) {
            if (!r.exhausted() && r.u() == best_u && r.v() == best_v) {
                total += r.count();
                r.advance();
            }
        }
        keep(best_u, best_v, total);
    }
    return edges;
}

CoVisGraph build_from_visits(std::vector<UserVisitSet> visits, const BuildConfig& cfg, BuildStats* stats) {
    BuildStats st;
    st.users = visits.size();

    PairAggregator agg(cfg);
    std::unordered_set<std::uint64_t> distinct_cells;
    for (const UserVisitSet& user : visits) {
        // A repeated location would double-count the user in pair weights.
        for (std::size_t i = 1; i < user.locations.size(); ++i) {
            if (!(user.locations[i - 1] < user.locations[i])) {
                throw InternalError("visit set for user '" + user.user_id +
                                    "' is not strictly sorted and distinct");
            }
        }
        if (cfg.max_locations_per_user && user.locations.size() > *cfg.max_locations_per_user) {
            ++st.users_capped;
            continue;
        }
        for (LocationId cell : user.locations) {
            distinct_cells.insert(cell.packed());
        }
        emit_pairs(user, [&](LocationId u, LocationId v) { agg.add(u, v); });
        const std::uint64_t n = user.locations.size();
        st.pairs_emitted += n * (n - 1) / 2;
    }
    st.distinct_locations_seen = distinct_cells.size();
    distinct_cells.clear();
    visits.clear();
    visits.shrink_to_fit();

    std::vector<WeightedEdge> edges = agg.finish();
    st.spill_runs = agg.spill_run_count();
    st.edges_kept = edges.size();

    CoVisGraph g = CoVisGraph::from_edges(edges);
    st.n_vertices = g.vertex_count();
    st.m_edges = g.edge_count();
    if (stats != nullptr) {
        *stats = st;
    }
    return g;
}

CoVisGraph build_graph(std::span<const PhotoRecord> records, const BuildConfig& cfg, BuildStats* stats) {
    VisitCollector col;
    for (const PhotoRecord& rec : records) {
        col.add(rec);
    }
    return build_from_visits(col.take(), cfg, stats);
}

}  // namespace covis
