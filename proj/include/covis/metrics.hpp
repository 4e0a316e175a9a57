#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "covis/graph.hpp"

namespace covis {

/// Integer-keyed empirical distribution (degree k -> count, weight w -> count).
/// Merging is associative and commutative, so shards can accumulate
/// independently.
struct Histogram {
    std::map<std::uint64_t, std::uint64_t> entries;  // counts >= 1 for present keys
    std::uint64_t total = 0;                         // sum of counts

    Histogram& operator+=(const Histogram& o) {
        for (const auto& [k, c] : o.entries) entries[k] += c;
        total += o.total;
        return *this;
    }
    friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct WeightStats {
    std::uint32_t min = 0;
    std::uint32_t max = 0;
    double mean = 0.0;
};

enum class FitMethod {
    kLogBinRegression,  // log-binned density regression, plot-comparable
    kDiscreteMle,       // zeta-normalized discrete maximum likelihood
};

/// Fitted decay exponent for p_x ~ x^(-exponent). Always reported with the
/// positive-decay sign convention.
struct PowerLawFit {
    double exponent = 0.0;
    FitMethod method = FitMethod::kLogBinRegression;
    std::uint64_t x_min = 1;
    // r^2 of the log-log regression, or the per-sample mean log-likelihood
    // for the MLE.
    double goodness = 0.0;
    std::optional<double> ks_distance;  // MLE only
    std::uint64_t n_points = 0;         // bins (regression) or samples >= x_min (MLE)
    bool quality_warning = false;       // non-decaying data
};

enum class KnnAveraging {
    kPerVertex,  // mean over degree-k vertices of each vertex's mean neighbor degree
    kPooled,     // one pool of all edge endpoints leaving degree-k vertices
};

/// Average neighbour degree per degree class. The two averaging modes
/// coincide analytically (every degree-k vertex contributes exactly k
/// endpoints); they differ only in accumulation order.
struct KnnCurve {
    std::map<std::uint64_t, double> points;
};

struct AssortativityResult {
    // Pearson correlation of degrees across edge endpoints; nullopt when
    // the endpoint-degree variance is zero (regular graphs).
    std::optional<double> r;
};

Histogram degree_histogram(const CoVisGraph& g);                       // throws MetricError on N=0
std::pair<Histogram, WeightStats> weight_histogram(const CoVisGraph& g);  // throws MetricError on M=0

PowerLawFit fit_power_law(const Histogram& h, FitMethod method,
                          std::optional<std::uint64_t> x_min = std::nullopt);

KnnCurve knn_curve(const CoVisGraph& g, KnnAveraging mode = KnnAveraging::kPerVertex);

AssortativityResult assortativity(const CoVisGraph& g);

/// Remaining degree distribution q_k = (k+1) p_{k+1} / sum_j j p_j,
/// derived from the degree histogram.
std::map<std::uint64_t, double> remaining_degree_distribution(const Histogram& degree_hist);

namespace detail {
/// Hurwitz zeta sum_{k>=a} k^(-alpha), alpha > 1, via direct summation
/// plus an Euler-Maclaurin tail.
double hurwitz_zeta(double alpha, std::uint64_t a);
}  // namespace detail

}  // namespace covis
