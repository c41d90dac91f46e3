#pragma once

// Shared generators and brute-force references for the test suites.

#include "kmedoids/dissimilarity.hpp"
#include "kmedoids/ingest.hpp"
#include "kmedoids/init.hpp"
#include "kmedoids/model.hpp"
#include "kmedoids/objective.hpp"
#include "kmedoids/rng.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace kmedoids::testing {

/// Symmetric matrix with integer entries in [1, max_value] off the diagonal.
inline DissimilarityMatrix random_int_matrix(std::size_t n, std::uint64_t max_value, std::uint64_t seed) {
    Rng rng(seed);
    return DissimilarityMatrix::from_function(
        n, [&](std::size_t, std::size_t) { return static_cast<double>(1 + rng.below(max_value)); });
}

/// Points on a line, Manhattan distance.
inline DissimilarityMatrix line_matrix(const std::vector<double>& xs) {
    return DissimilarityMatrix::from_function(xs.size(), [&](std::size_t i, std::size_t j) { return std::abs(xs[i] - xs[j]); });
}

inline double normal(Rng& rng) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// n points in `dim` dimensions around `centers` Gaussian blob centers.
inline VectorData gaussian_blobs(std::size_t n, std::size_t dim, std::size_t centers, double spread,
                                 std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> c(centers * dim);
    for (double& v : c) v = rng.uniform() * 100.0;
    VectorData data;
    data.n = n;
    data.dim = dim;
    data.values.resize(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t which = rng.below(centers);
        for (std::size_t t = 0; t < dim; ++t) data.values[i * dim + t] = c[which * dim + t] + spread * normal(rng);
    }
    return data;
}

/// Plain minimum over medoids per point, no caches involved.
template <DissimilarityView V>
double td_direct(const V& d, const std::vector<PointIndex>& medoids) {
    double td = 0.0;
    for (PointIndex o = 0; o < d.size(); ++o) {
        double best = std::numeric_limits<double>::infinity();
        for (PointIndex m : medoids) best = std::min(best, static_cast<double>(d(m, o)));
        td += best;
    }
    return td;
}

struct Optimum {
    double loss = std::numeric_limits<double>::infinity();
    std::vector<PointIndex> medoids;
};

/// Exhaustive search over all C(n, k) medoid sets.
template <DissimilarityView V>
Optimum brute_force_optimum(const V& d, std::size_t k) {
    Optimum best;
    std::vector<PointIndex> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    const std::size_t n = d.size();
    while (true) {
        const double td = td_direct(d, pick);
        if (td < best.loss) best = {td, pick};
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
        if (i == 0) return best;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

/// Smallest loss change over every single swap, each evaluated by recomputing TD.
template <DissimilarityView V>
double best_swap_gain(const V& d, const std::vector<PointIndex>& medoids) {
    const double base = td_direct(d, medoids);
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> is_medoid(d.size(), false);
    for (PointIndex m : medoids) is_medoid[m] = true;
    for (std::size_t i = 0; i < medoids.size(); ++i) {
        for (PointIndex c = 0; c < d.size(); ++c) {
            if (is_medoid[c]) continue;
            std::vector<PointIndex> swapped = medoids;
            swapped[i] = c;
            best = std::min(best, td_direct(d, swapped) - base);
        }
    }
    return best;
}

/// The six-point line of the Alternating counterexample. Loss 10 at the start
/// medoids {1, 4}; the optimum {0, 3} has loss 6.
inline std::vector<double> stuck_line_points() { return {-7.0, 0.0, 1.0, 2.0, 3.0, 4.0}; }
inline std::vector<PointIndex> stuck_line_start() { return {1, 4}; }

}  // namespace kmedoids::testing
