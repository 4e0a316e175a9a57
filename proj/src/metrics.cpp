#include "covis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "covis/errors.hpp"

namespace covis {

Histogram degree_histogram(const CoVisGraph& g) {
    if (g.vertex_count() == 0) {
        throw MetricError("degree_histogram: empty graph has no distribution");
    }
    Histogram h;
    for (VertexId i = 0; i < g.vertex_count(); ++i) {
        ++h.entries[g.degree(i)];
    }
    h.total = g.vertex_count();
    return h;
}

std::pair<Histogram, WeightStats> weight_histogram(const CoVisGraph& g) {
    if (g.edge_count() == 0) {
        throw MetricError("weight_histogram: graph has no edges");
    }
    Histogram h;
    WeightStats st;
    st.min = UINT32_MAX;
    std::uint64_t sum = 0;
    g.for_each_edge([&](VertexId, VertexId, std::uint32_t w) {
        ++h.entries[w];
        st.min = std::min(st.min, w);
        st.max = std::max(st.max, w);
        sum += w;
    });
    h.total = g.edge_count();
    st.mean = static_cast<double>(sum) / static_cast<double>(g.edge_count());
    return {h, st};
}

namespace detail {

double hurwitz_zeta(double alpha, std::uint64_t a) {
    // Direct terms up to b-1, then the Euler-Maclaurin tail from b.
    const std::uint64_t b = a + 32;
    double s = 0.0;
    for (std::uint64_t k = a; k < b; ++k) {
        s += std::pow(static_cast<double>(k), -alpha);
    }
    const double bd = static_cast<double>(b);
    s += std::pow(bd, 1.0 - alpha) / (alpha - 1.0);
    s += 0.5 * std::pow(bd, -alpha);
    s += alpha / 12.0 * std::pow(bd, -alpha - 1.0);
    s -= alpha * (alpha + 1.0) * (alpha + 2.0) / 720.0 * std::pow(bd, -alpha - 3.0);
    return s;
}

}  // namespace detail

namespace {

struct LinearFit {
    double slope = 0.0;
    double r_squared = 1.0;
};

LinearFit least_squares(const std::vector<std::pair<double, double>>& pts) {
    const double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    LinearFit fit;
    const double vx = n * sxx - sx * sx;
    const double vy = n * syy - sy * sy;
    const double cov = n * sxy - sx * sy;
    fit.slope = cov / vx;
    fit.r_squared = vy > 0 ? (cov * cov) / (vx * vy) : 1.0;  // flat data: perfect constant fit
    return fit;
}

PowerLawFit fit_regression(const Histogram& h, std::uint64_t x_min) {
    std::uint64_t max_key = 0;
    std::size_t usable_keys = 0;
    for (const auto& [k, c] : h.entries) {
        if (k >= x_min) {
            ++usable_keys;
            max_key = std::max(max_key, k);
        }
    }
    if (usable_keys < 3) {
        throw MetricError("fit_power_law: fewer than 3 distinct values >= x_min");
    }

    // Logarithmic bins [x_min*2^j, x_min*2^(j+1)); the last bin is clipped
    // at max_key+1 so a partially filled top bin is not diluted. The bin
    // abscissa is the mass-weighted mean key, which keeps single-value
    // bins exactly on the p_k curve.
    std::vector<std::pair<double, double>> pts;
    const double total = static_cast<double>(h.total);
    auto it = h.entries.lower_bound(x_min);
    std::uint64_t lo = x_min;
    while (lo <= max_key) {
        const std::uint64_t hi = std::min(lo * 2, max_key + 1);
        std::uint64_t mass = 0;
        double key_mass = 0.0;
        while (it != h.entries.end() && it->first < hi) {
            mass += it->second;
            key_mass += static_cast<double>(it->first) * static_cast<double>(it->second);
            ++it;
        }
        if (mass > 0) {
            const double density = static_cast<double>(mass) / (total * static_cast<double>(hi - lo));
            const double center = key_mass / static_cast<double>(mass);
            pts.emplace_back(std::log(center), std::log(density));
        }
        lo *= 2;
    }
    if (pts.size() < 3) {
        throw MetricError("fit_power_law: fewer than 3 usable log bins");
    }

    const LinearFit fit = least_squares(pts);
    PowerLawFit out;
    out.method = FitMethod::kLogBinRegression;
    out.x_min = x_min;
    out.exponent = -fit.slope;
    out.goodness = fit.r_squared;
    out.n_points = pts.size();
    out.quality_warning = out.exponent <= 1e-6;
    return out;
}

struct MleResult {
    double alpha = 0.0;
    double mean_loglik = 0.0;
    std::uint64_t n = 0;
    bool at_bound = false;
};

MleResult mle_alpha(const Histogram& h, std::uint64_t x_min) {
    std::uint64_t n = 0;
    double sum_log = 0.0;
    for (const auto& [k, c] : h.entries) {
        if (k >= x_min) {
            n += c;
            sum_log += static_cast<double>(c) * std::log(static_cast<double>(k));
        }
    }
    auto loglik = [&](double alpha) {
        return -static_cast<double>(n) * std::log(detail::hurwitz_zeta(alpha, x_min)) - alpha * sum_log;
    };
    // Golden-section maximization; the likelihood is unimodal in alpha.
    double lo = 1.000001, hi = 20.0;
    constexpr double kInvPhi = 0.6180339887498949;
    double m1 = hi - kInvPhi * (hi - lo);
    double m2 = lo + kInvPhi * (hi - lo);
    double f1 = loglik(m1), f2 = loglik(m2);
    for (int iter = 0; iter < 120 && hi - lo > 1e-10; ++iter) {
        if (f1 >= f2) {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - kInvPhi * (hi - lo);
            f1 = loglik(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + kInvPhi * (hi - lo);
            f2 = loglik(m2);
        }
    }
    MleResult res;
    res.alpha = 0.5 * (lo + hi);
    res.mean_loglik = loglik(res.alpha) / static_cast<double>(n);
    res.n = n;
    res.at_bound = res.alpha < 1.001 || res.alpha > 19.99;
    return res;
}

double ks_distance(const Histogram& h, std::uint64_t x_min, double alpha) {
    std::uint64_t n = 0;
    for (const auto& [k, c] : h.entries) {
        if (k >= x_min) n += c;
    }
    const double z_min = detail::hurwitz_zeta(alpha, x_min);
    double cum = 0.0;
    double d = 0.0;
    for (auto it = h.entries.lower_bound(x_min); it != h.entries.end(); ++it) {
        cum += static_cast<double>(it->second);
        const double emp = cum / static_cast<double>(n);
        const double model = 1.0 - detail::hurwitz_zeta(alpha, it->first + 1) / z_min;
        d = std::max(d, std::abs(emp - model));
    }
    return d;
}

PowerLawFit fit_mle(const Histogram& h, std::optional<std::uint64_t> x_min_opt) {
    auto distinct_at_least = [&](std::uint64_t x_min) {
        std::size_t cnt = 0;
        for (auto it = h.entries.lower_bound(x_min); it != h.entries.end(); ++it) ++cnt;
        return cnt;
    };

    std::uint64_t best_xmin = 0;
    if (x_min_opt) {
        best_xmin = *x_min_opt;
        if (distinct_at_least(best_xmin) < 3) {
            throw MetricError("fit_power_law: fewer than 3 distinct values >= x_min");
        }
    } else {
        // Scan candidate x_min values, keeping the one whose fitted model
        // is closest to the data in Kolmogorov-Smirnov distance. Candidates
        // are capped at 64 evenly spaced distinct keys to bound the scan on
        // histograms with many thousands of distinct values.
        std::vector<std::uint64_t> candidates;
        if (h.entries.size() >= 3) {
            candidates.reserve(h.entries.size() - 2);
            for (const auto& [k, c] : h.entries) {
                candidates.push_back(k);  // the i-th key leaves size()-i distinct keys
            }
            candidates.resize(h.entries.size() - 2);
        }
        if (candidates.empty()) {
            throw MetricError("fit_power_law: no x_min candidate leaves 3 distinct values");
        }
        constexpr std::size_t kMaxCandidates = 64;
        const std::size_t stride = std::max<std::size_t>(1, candidates.size() / kMaxCandidates);
        double best_d = HUGE_VAL;
        for (std::size_t i = 0; i < candidates.size(); i += stride) {
            const std::uint64_t cand = candidates[i];
            const MleResult r = mle_alpha(h, cand);
            const double d = ks_distance(h, cand, r.alpha);
            if (d < best_d) {
                best_d = d;
                best_xmin = cand;
            }
        }
    }

    const MleResult r = mle_alpha(h, best_xmin);
    PowerLawFit out;
    out.method = FitMethod::kDiscreteMle;
    out.x_min = best_xmin;
    out.exponent = r.alpha;
    out.goodness = r.mean_loglik;
    out.ks_distance = ks_distance(h, best_xmin, r.alpha);
    out.n_points = r.n;
    out.quality_warning = r.at_bound;
    return out;
}

}  // namespace

PowerLawFit fit_power_law(const Histogram& h, FitMethod method, std::optional<std::uint64_t> x_min) {
    if (h.total == 0 || h.entries.empty()) {
        throw MetricError("fit_power_law: empty histogram");
    }
    if (x_min && *x_min < 1) {
        throw MetricError("fit_power_law: x_min must be >= 1");
    }
    if (method == FitMethod::kLogBinRegression) {
        return fit_regression(h, x_min.value_or(h.entries.begin()->first));
    }
    return fit_mle(h, x_min);
}

KnnCurve knn_curve(const CoVisGraph& g, KnnAveraging mode) {
    if (g.edge_count() == 0) {
        throw MetricError("knn_curve: graph has no edges");
    }
    // acc[k] accumulates per-vertex mean neighbor degrees (per-vertex mode)
    // or summed endpoint degrees (pooled mode).
    std::map<std::uint64_t, double> acc;
    std::map<std::uint64_t, std::uint64_t> vertices_of_degree;
    for (VertexId i = 0; i < g.vertex_count(); ++i) {
        const std::uint64_t k = g.degree(i);
        std::uint64_t nb_sum = 0;
        for (VertexId v : g.neighbors(i)) {
            nb_sum += g.degree(v);
        }
        ++vertices_of_degree[k];
        if (mode == KnnAveraging::kPerVertex) {
            acc[k] += static_cast<double>(nb_sum) / static_cast<double>(k);
        } else {
            acc[k] += static_cast<double>(nb_sum);
        }
    }
    KnnCurve curve;
    for (const auto& [k, sum] : acc) {
        const double denom = mode == KnnAveraging::kPerVertex
                                 ? static_cast<double>(vertices_of_degree[k])
                                 : static_cast<double>(vertices_of_degree[k] * k);
        curve.points[k] = sum / denom;
    }
    return curve;
}

AssortativityResult assortativity(const CoVisGraph& g) {
    if (g.edge_count() == 0) {
        throw MetricError("assortativity: graph has no edges");
    }
    // Pearson over the 2M directed endpoint pairs, in exact integer
    // arithmetic. Both orientations of every edge contribute, which makes
    // the x and y marginals identical.
    using i128 = unsigned __int128;
    i128 s_x = 0, s_xx = 0, s_xy = 0;
    g.for_each_edge([&](VertexId u, VertexId v, std::uint32_t) {
        const i128 du = g.degree(u);
        const i128 dv = g.degree(v);
        s_x += du + dv;
        s_xx += du * du + dv * dv;
        s_xy += 2 * du * dv;
    });
    const i128 n = 2 * static_cast<i128>(g.edge_count());
    const i128 var_num = n * s_xx - s_x * s_x;  // n^2 * variance, >= 0
    if (var_num == 0) {
        return {};  // regular graph: correlation undefined
    }
    // cov and var share the same n^2 scaling, so the ratio is r itself.
    const bool cov_neg = n * s_xy < s_x * s_x;
    const i128 cov_abs = cov_neg ? s_x * s_x - n * s_xy : n * s_xy - s_x * s_x;
    const double r =
        (cov_neg ? -1.0 : 1.0) * static_cast<double>(static_cast<long double>(cov_abs) /
                                                     static_cast<long double>(var_num));
    return {r};
}

std::map<std::uint64_t, double> remaining_degree_distribution(const Histogram& degree_hist) {
    if (degree_hist.total == 0) {
        throw MetricError("remaining_degree_distribution: empty histogram");
    }
    double norm = 0.0;  // sum_j j * count_j
    for (const auto& [k, c] : degree_hist.entries) {
        norm += static_cast<double>(k) * static_cast<double>(c);
    }
    if (norm == 0.0) {
        throw MetricError("remaining_degree_distribution: all degrees are zero");
    }
    std::map<std::uint64_t, double> q;
    for (const auto& [k, c] : degree_hist.entries) {
        if (k >= 1) {
            q[k - 1] = static_cast<double>(k) * static_cast<double>(c) / norm;
        }
    }
    return q;
}

}  // namespace covis
