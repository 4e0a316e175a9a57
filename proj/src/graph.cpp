#include "covis/graph.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "covis/errors.hpp"

namespace covis {

CoVisGraph CoVisGraph::from_edges(std::span<const WeightedEdge> edges) {
    CoVisGraph g;
    if (edges.empty()) {
        return g;
    }

    std::vector<std::uint64_t> keys;
    keys.reserve(edges.size() * 2);
    const WeightedEdge* prev = nullptr;
    for (const WeightedEdge& e : edges) {
        const std::uint64_t uk = e.u.packed();
        const std::uint64_t vk = e.v.packed();
        if (uk >= vk) {
            throw InternalError("from_edges: edge not in canonical u < v form");
        }
        if (e.weight == 0) {
            throw InternalError("from_edges: zero-weight edge");
        }
        if (prev != nullptr) {
            const auto pk = std::pair{prev->u.packed(), prev->v.packed()};
            if (pk == std::pair{uk, vk}) {
                throw InternalError("from_edges: duplicate edge");
            }
            if (pk > std::pair{uk, vk}) {
                throw InternalError("from_edges: edge stream not sorted");
            }
        }
        prev = &e;
        keys.push_back(uk);
        keys.push_back(vk);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    g.keys_ = std::move(keys);
    g.m_ = edges.size();

    const std::uint64_t n = g.keys_.size();
    auto index_of = [&](std::uint64_t key) -> VertexId {
        auto it = std::lower_bound(g.keys_.begin(), g.keys_.end(), key);
        return static_cast<VertexId>(it - g.keys_.begin());
    };

    std::vector<std::uint64_t> deg(n, 0);
    for (const WeightedEdge& e : edges) {
        ++deg[index_of(e.u.packed())];
        ++deg[index_of(e.v.packed())];
    }
    g.offsets_.assign(n + 1, 0);
    std::partial_sum(deg.begin(), deg.end(), g.offsets_.begin() + 1);

    g.neighbors_.resize(2 * g.m_);
    g.weights_.resize(2 * g.m_);
    std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    // Canonical sort order makes every per-vertex list come out ascending:
    // mirror entries (u < v, all u) land before the vertex's own block.
    for (const WeightedEdge& e : edges) {
        const VertexId ui = index_of(e.u.packed());
        const VertexId vi = index_of(e.v.packed());
        g.neighbors_[cursor[ui]] = vi;
        g.weights_[cursor[ui]] = e.weight;
        ++cursor[ui];
        g.neighbors_[cursor[vi]] = ui;
        g.weights_[cursor[vi]] = e.weight;
        ++cursor[vi];
    }
    return g;
}

void CoVisGraph::check_index(VertexId i) const {
    if (i >= keys_.size()) {
        throw std::out_of_range("vertex index " + std::to_string(i) + " out of range (N=" +
                                std::to_string(keys_.size()) + ")");
    }
}

LocationId CoVisGraph::location(VertexId i) const {
    check_index(i);
    return LocationId::from_packed(keys_[i]);
}

std::optional<VertexId> CoVisGraph::find(LocationId id) const {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), id.packed());
    if (it == keys_.end() || *it != id.packed()) {
        return std::nullopt;
    }
    return static_cast<VertexId>(it - keys_.begin());
}

std::uint32_t CoVisGraph::degree(VertexId i) const {
    check_index(i);
    return static_cast<std::uint32_t>(offsets_[i + 1] - offsets_[i]);
}

std::span<const VertexId> CoVisGraph::neighbors(VertexId i) const {
    check_index(i);
    return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
}

std::span<const std::uint32_t> CoVisGraph::edge_weights(VertexId i) const {
    check_index(i);
    return {weights_.data() + offsets_[i], weights_.data() + offsets_[i + 1]};
}

namespace {

VertexId uf_find(std::vector<VertexId>& parent, VertexId x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];  // path halving
        x = parent[x];
    }
    return x;
}

}  // namespace

ComponentReport components(const CoVisGraph& g) {
    ComponentReport rep;
    const std::uint64_t n = g.vertex_count();
    if (n == 0) {
        return rep;
    }
    std::vector<VertexId> parent(n);
    std::vector<std::uint64_t> size(n, 1);
    for (VertexId i = 0; i < n; ++i) {
        parent[i] = i;
    }
    for (VertexId u = 0; u < n; ++u) {
        for (VertexId v : g.neighbors(u)) {
            if (v <= u) continue;
            VertexId ru = uf_find(parent, u);
            VertexId rv = uf_find(parent, v);
            if (ru == rv) continue;
            if (size[ru] < size[rv]) std::swap(ru, rv);
            parent[rv] = ru;
            size[ru] += size[rv];
        }
    }
    for (VertexId i = 0; i < n; ++i) {
        if (uf_find(parent, i) == i) {
            rep.sizes.push_back(size[i]);
        }
    }
    std::sort(rep.sizes.begin(), rep.sizes.end(), std::greater<>());
    rep.component_count = rep.sizes.size();
    rep.giant_size = rep.sizes.front();
    rep.giant_fraction = static_cast<double>(rep.giant_size) / static_cast<double>(n);
    return rep;
}

namespace {

constexpr char kSnapshotMagic[8] = {'C', 'O', 'V', 'I', 'S', 'G', '0', '1'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

class ByteCursor {
public:
    ByteCursor(const std::string& buf, const std::string& name) : buf_(buf), name_(name) {}

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) {
            throw IoError("truncated snapshot: " + name_);
        }
    }
    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    const std::string& buf_;
    std::string name_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_snapshot(const CoVisGraph& g, const std::filesystem::path& path) {
    std::string out;
    out.reserve(16 + 8 * (g.keys_.size() + g.offsets_.size()) + 8 * g.neighbors_.size());
    out.append(kSnapshotMagic, sizeof(kSnapshotMagic));
    put_u64(out, g.keys_.size());
    put_u64(out, g.m_);
    for (std::uint64_t k : g.keys_) put_u64(out, k);
    for (std::uint64_t o : g.offsets_) put_u64(out, o);
    for (VertexId v : g.neighbors_) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    for (std::uint32_t w : g.weights_) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((w >> (8 * i)) & 0xff));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open snapshot for writing: " + path.string());
    }
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) {
        throw IoError("write failed: " + path.string());
    }
}

CoVisGraph load_snapshot(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open snapshot: " + path.string());
    }
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < sizeof(kSnapshotMagic) ||
        std::memcmp(buf.data(), kSnapshotMagic, sizeof(kSnapshotMagic)) != 0) {
        throw IoError("snapshot header mismatch (bad magic or unsupported version): " + path.string());
    }
    ByteCursor c2(buf, path.string());
    c2.u64();  // magic, already verified
    const std::uint64_t n = c2.u64();
    const std::uint64_t m = c2.u64();
    const std::uint64_t expected = 24 + 8 * n + 8 * (n + 1) + 8 * (2 * m);
    if (buf.size() != expected) {
        throw IoError("snapshot size mismatch (truncated or corrupt): " + path.string());
    }

    CoVisGraph g;
    g.m_ = m;
    g.keys_.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) g.keys_[i] = c2.u64();
    g.offsets_.resize(n + 1);
    for (std::uint64_t i = 0; i <= n; ++i) g.offsets_[i] = c2.u64();
    g.neighbors_.resize(2 * m);
    for (std::uint64_t i = 0; i < 2 * m; ++i) g.neighbors_[i] = c2.u32();
    g.weights_.resize(2 * m);
    for (std::uint64_t i = 0; i < 2 * m; ++i) g.weights_[i] = c2.u32();
    if (c2.remaining() != 0) {
        throw IoError("snapshot has trailing bytes: " + path.string());
    }

    // Cheap structural validation so corrupted payloads fail here, not in
    // the metrics.
    if (g.offsets_.front() != 0 || g.offsets_.back() != 2 * m) {
        throw IoError("snapshot offsets corrupt: " + path.string());
    }
    for (std::uint64_t i = 0; i < n; ++i) {
        if (g.offsets_[i] > g.offsets_[i + 1]) {
            throw IoError("snapshot offsets corrupt: " + path.string());
        }
        if (i + 1 < n && g.keys_[i] >= g.keys_[i + 1]) {
            throw IoError("snapshot vertex table not sorted: " + path.string());
        }
    }
    for (VertexId v : g.neighbors_) {
        if (v >= n) {
            throw IoError("snapshot neighbor index out of range: " + path.string());
        }
    }
    return g;
}

}  // namespace covis
