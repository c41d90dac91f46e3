#pragma once

// Initial medoid selection: uniform random, BUILD, GreedyG, LAB,
// distance-weighted (k-means++ with linear weights) and Park & Jun.

#include "kmedoids/dissimilarity.hpp"
#include "kmedoids/model.hpp"
#include "kmedoids/objective.hpp"
#include "kmedoids/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmedoids {

enum class InitMethod { Random, Build, GreedyG, Lab, DistanceWeighted, ParkJun };

struct InitConfig {
    InitMethod method = InitMethod::Random;
    std::uint64_t seed = 0;
};

namespace detail {

inline void require_k(std::size_t k, std::size_t n) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (k >= n) {
        throw std::invalid_argument("k must be smaller than the number of points (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
}

// `count` distinct values from `pool`, partial Fisher-Yates. Reorders `pool`.
inline std::vector<PointIndex> draw_without_replacement(std::vector<PointIndex>& pool, std::size_t count, Rng& rng) {
    count = std::min(count, pool.size());
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count)};
}

inline std::vector<PointIndex> non_medoids(std::size_t n, const std::vector<bool>& is_medoid) {
    std::vector<PointIndex> out;
    out.reserve(n);
    for (PointIndex p = 0; p < n; ++p) {
        if (!is_medoid[p]) out.push_back(p);
    }
    return out;
}

template <DissimilarityView V>
void update_nearest(const V& d, PointIndex medoid, std::vector<double>& d_nearest) {
    for (PointIndex o = 0; o < d.size(); ++o) d_nearest[o] = std::min(d_nearest[o], static_cast<double>(d(medoid, o)));
}

// Candidate that reduces sum over `points` of d_nearest the most (ties: first in order).
template <DissimilarityView V>
PointIndex best_addition(const V& d, const std::vector<PointIndex>& candidates, const std::vector<PointIndex>& points,
                         const std::vector<double>& d_nearest) {
    PointIndex best = candidates.front();
    double best_delta = std::numeric_limits<double>::infinity();
    for (PointIndex c : candidates) {
        double delta = 0.0;
        for (PointIndex o : points) {
            const double diff = d(c, o) - d_nearest[o];
            if (diff < 0.0) delta += diff;
        }
        if (delta < best_delta) best_delta = delta, best = c;
    }
    return best;
}

template <DissimilarityView V>
std::vector<PointIndex> build_first(const V& d) {
    std::vector<PointIndex> all(d.size());
    std::iota(all.begin(), all.end(), PointIndex{0});
    return {medoid_of_set(d, std::span<const PointIndex>(all))};
}

}  // namespace detail

/// k distinct indices drawn uniformly without replacement.
template <DissimilarityView V>
MedoidSet init_random(const V& d, std::size_t k, std::uint64_t seed) {
    const std::size_t n = d.size();
    detail::require_k(k, n);
    Rng rng(seed);
    std::vector<PointIndex> pool(n);
    std::iota(pool.begin(), pool.end(), PointIndex{0});
    return MedoidSet(detail::draw_without_replacement(pool, k, rng), n);
}

/// PAM BUILD. The first medoid has the smallest distance sum; each further
/// medoid is the non-medoid reducing TD the most (its own distance included).
/// Ties go to the smaller index. O(n^2 k).
template <DissimilarityView V>
MedoidSet init_build(const V& d, std::size_t k) {
    const std::size_t n = d.size();
    detail::require_k(k, n);
    std::vector<PointIndex> chosen = detail::build_first(d);
    std::vector<bool> is_medoid(n, false);
    is_medoid[chosen[0]] = true;
    std::vector<double> d_nearest(n, std::numeric_limits<double>::infinity());
    detail::update_nearest(d, chosen[0], d_nearest);
    while (chosen.size() < k) {
        const std::vector<PointIndex> pool = detail::non_medoids(n, is_medoid);
        const PointIndex next = detail::best_addition(d, pool, pool, d_nearest);
        chosen.push_back(next);
        is_medoid[next] = true;
        detail::update_nearest(d, next, d_nearest);
    }
    return MedoidSet(std::move(chosen), n);
}

/// GreedyG: BUILD where, after every addition, medoids are moved to the
/// medoid of their current cluster until stable (at most 100 rounds).
template <DissimilarityView V>
MedoidSet init_greedy_g(const V& d, std::size_t k) {
    constexpr std::size_t max_rounds = 100;
    const std::size_t n = d.size();
    detail::require_k(k, n);
    std::vector<PointIndex> chosen = detail::build_first(d);
    std::vector<double> d_nearest(n);
    std::vector<bool> is_medoid(n, false);
    std::vector<std::vector<PointIndex>> members;
    while (true) {
        MedoidSet current(chosen, n);
        for (std::size_t round = 0; round < max_rounds && chosen.size() > 1; ++round) {
            const std::vector<Slot> assignment = nearest_slots(d, current);
            members.assign(chosen.size(), {});
            for (PointIndex o = 0; o < n; ++o) members[assignment[o]].push_back(o);
            bool changed = false;
            for (Slot i = 0; i < chosen.size(); ++i) {
                if (members[i].empty()) continue;
                const std::span<const PointIndex> cluster(members[i]);
                const PointIndex m = medoid_of_set(d, cluster);
                if (m != current[i] && distance_sum(d, cluster, m) < distance_sum(d, cluster, current[i])) {
                    current.replace(i, m);
                    changed = true;
                }
            }
            if (!changed) break;
        }
        chosen = current.indices();
        if (chosen.size() == k) return current;
        std::fill(is_medoid.begin(), is_medoid.end(), false);
        std::fill(d_nearest.begin(), d_nearest.end(), std::numeric_limits<double>::infinity());
        for (PointIndex m : chosen) {
            is_medoid[m] = true;
            detail::update_nearest(d, m, d_nearest);
        }
        const std::vector<PointIndex> pool = detail::non_medoids(n, is_medoid);
        chosen.push_back(detail::best_addition(d, pool, pool, d_nearest));
    }
}

/// LAB (linear approximative BUILD): before each selection draw
/// 10 + ceil(sqrt(n)) non-medoids and pick the one reducing the loss of that
/// subsample the most. The first medoid is the medoid of the first subsample.
template <DissimilarityView V>
MedoidSet init_lab(const V& d, std::size_t k, std::uint64_t seed) {
    const std::size_t n = d.size();
    detail::require_k(k, n);
    const std::size_t sample_size = 10 + static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    Rng rng(seed);
    std::vector<bool> is_medoid(n, false);
    std::vector<double> d_nearest(n, std::numeric_limits<double>::infinity());
    std::vector<PointIndex> chosen;
    chosen.reserve(k);
    while (chosen.size() < k) {
        std::vector<PointIndex> pool = detail::non_medoids(n, is_medoid);
        std::vector<PointIndex> sample = detail::draw_without_replacement(pool, sample_size, rng);
        std::sort(sample.begin(), sample.end());
        const PointIndex next = chosen.empty() ? medoid_of_set(d, std::span<const PointIndex>(sample))
                                               : detail::best_addition(d, sample, sample, d_nearest);
        chosen.push_back(next);
        is_medoid[next] = true;
        detail::update_nearest(d, next, d_nearest);
    }
    return MedoidSet(std::move(chosen), n);
}

/// k-means++ style seeding with linear weights: the first medoid is uniform,
/// every further one is drawn with probability proportional to its distance
/// to the nearest chosen medoid. All-zero weights fall back to uniform.
template <DissimilarityView V>
MedoidSet init_distance_weighted(const V& d, std::size_t k, std::uint64_t seed) {
    const std::size_t n = d.size();
    detail::require_k(k, n);
    Rng rng(seed);
    std::vector<bool> is_medoid(n, false);
    std::vector<double> d_nearest(n, std::numeric_limits<double>::infinity());
    std::vector<PointIndex> chosen{static_cast<PointIndex>(rng.below(n))};
    is_medoid[chosen[0]] = true;
    detail::update_nearest(d, chosen[0], d_nearest);
    while (chosen.size() < k) {
        double total = 0.0;
        for (PointIndex o = 0; o < n; ++o) {
            if (!is_medoid[o]) total += d_nearest[o];
        }
        PointIndex next = n;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            PointIndex last_positive = n;
            for (PointIndex o = 0; o < n; ++o) {
                if (is_medoid[o] || d_nearest[o] <= 0.0) continue;
                acc += d_nearest[o];
                last_positive = o;
                if (acc > r) {
                    next = o;
                    break;
                }
            }
            if (next == n) next = last_positive;  // rounding at the top end
        } else {
            const std::vector<PointIndex> pool = detail::non_medoids(n, is_medoid);
            next = pool[rng.below(pool.size())];
        }
        chosen.push_back(next);
        is_medoid[next] = true;
        detail::update_nearest(d, next, d_nearest);
    }
    return MedoidSet(std::move(chosen), n);
}

/// Park & Jun: the k points with the smallest v_j = sum_i d(i,j) / sum_l d(i,l)
/// (ties: smaller index). Rows summing to zero contribute nothing.
template <DissimilarityView V>
MedoidSet init_park_jun(const V& d, std::size_t k) {
    const std::size_t n = d.size();
    detail::require_k(k, n);
    std::vector<double> row_sum(n, 0.0);
    for (PointIndex i = 0; i < n; ++i) {
        for (PointIndex l = 0; l < n; ++l) row_sum[i] += d(i, l);
    }
    std::vector<double> v(n, 0.0);
    for (PointIndex j = 0; j < n; ++j) {
        for (PointIndex i = 0; i < n; ++i) {
            if (row_sum[i] > 0.0) v[j] += d(i, j) / row_sum[i];
        }
    }
    std::vector<PointIndex> order(n);
    std::iota(order.begin(), order.end(), PointIndex{0});
    std::stable_sort(order.begin(), order.end(), [&](PointIndex a, PointIndex b) { return v[a] < v[b]; });
    order.resize(k);
    return MedoidSet(std::move(order), n);
}

template <DissimilarityView V>
MedoidSet initialize(const V& d, std::size_t k, const InitConfig& config) {
    switch (config.method) {
        case InitMethod::Random: return init_random(d, k, config.seed);
        case InitMethod::Build: return init_build(d, k);
        case InitMethod::GreedyG: return init_greedy_g(d, k);
        case InitMethod::Lab: return init_lab(d, k, config.seed);
        case InitMethod::DistanceWeighted: return init_distance_weighted(d, k, config.seed);
        case InitMethod::ParkJun: return init_park_jun(d, k);
    }
    throw std::invalid_argument("unknown initialization method");
}

}  // namespace kmedoids
