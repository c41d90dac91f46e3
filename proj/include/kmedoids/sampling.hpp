#pragma once

// Subsampling and randomized-search approximations: CLARA, FastCLARA,
// CLARANS and FastCLARANS.

#include "kmedoids/dissimilarity.hpp"
#include "kmedoids/init.hpp"
#include "kmedoids/model.hpp"
#include "kmedoids/objective.hpp"
#include "kmedoids/optimize.hpp"
#include "kmedoids/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmedoids {

enum class SampleSizeRule { Classic, Doubled, Sqrt };

/// 40 + 2k, 80 + 4k, or ceil(sqrt(n)) + 4k.
inline std::size_t sample_size(SampleSizeRule rule, std::size_t n, std::size_t k) {
    switch (rule) {
        case SampleSizeRule::Classic: return 40 + 2 * k;
        case SampleSizeRule::Doubled: return 80 + 4 * k;
        case SampleSizeRule::Sqrt: return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))) + 4 * k;
    }
    throw std::invalid_argument("unknown sample size rule");
}

struct ClaraConfig {
    std::size_t n_samples = 5;
    SampleSizeRule sample_size_rule = SampleSizeRule::Classic;
    OptimizerConfig inner_algorithm{Algorithm::Pam};
    InitMethod inner_init = InitMethod::Build;
    std::uint64_t seed = 0;

    /// CLARA with the faster inner optimizer and twice the classic sample size.
    static ClaraConfig fast_defaults() {
        ClaraConfig config;
        config.sample_size_rule = SampleSizeRule::Doubled;
        config.inner_algorithm.algorithm = Algorithm::FasterPam;
        config.inner_init = InitMethod::Lab;
        return config;
    }
};

struct ClaransConfig {
    std::size_t num_local = 2;
    /// Consecutive failed attempts allowed, as a fraction of k(n-k) edges for
    /// CLARANS or of (n-k) candidates for FastCLARANS. Empty selects
    /// 0.0125 respectively 0.025.
    std::optional<double> max_neighbor_fraction;
    std::uint64_t seed = 0;
};

namespace detail {

template <DissimilarityView V>
ClusteringResult full_data_result(const V& d, MedoidSet medoids) {
    ClusteringResult result;
    result.loss = total_deviation(d, medoids);
    result.assignment = nearest_slots(d, medoids);
    result.medoids = medoids.indices();
    return result;
}

inline std::size_t attempt_budget(double fraction, std::size_t edges) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("max_neighbor_fraction must lie in (0, 1]");
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(edges))));
}

}  // namespace detail

/// CLARA: run initialization plus the inner optimizer on n_samples independent
/// random subsamples (viewed through the full matrix, never copied), keep the
/// medoids with the lowest loss on the full data. A sample size above n is
/// clamped to n with a warning.
template <DissimilarityView V>
ClusteringResult clara(const V& d, std::size_t k, const ClaraConfig& config) {
    const auto start = detail::Clock::now();
    const std::size_t n = d.size();
    detail::require_k(k, n);
    if (config.n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
    std::size_t s = sample_size(config.sample_size_rule, n, k);
    std::vector<std::string> warnings;
    if (s > n) {
        warnings.push_back("sample size " + std::to_string(s) + " exceeds n=" + std::to_string(n) +
                           "; clamped to n");
        s = n;
    }
    if (s <= k) throw std::invalid_argument("sample size must exceed k");

    std::optional<ClusteringResult> best;
    std::size_t iterations = 0, swaps = 0;
    bool converged = true;
    for (std::size_t draw = 0; draw < config.n_samples; ++draw) {
        Rng rng(derive_seed(config.seed, draw));
        std::vector<PointIndex> pool(n);
        std::iota(pool.begin(), pool.end(), PointIndex{0});
        std::vector<PointIndex> sample = detail::draw_without_replacement(pool, s, rng);
        std::sort(sample.begin(), sample.end());
        const SubsetView<V> view(d, sample);

        const MedoidSet start_medoids = initialize(view, k, {config.inner_init, rng.next()});
        const ClusteringResult inner = optimize(view, start_medoids, config.inner_algorithm);
        iterations += inner.n_iterations;
        swaps += inner.n_swaps;
        converged = converged && inner.converged;

        std::vector<PointIndex> mapped;
        mapped.reserve(k);
        for (PointIndex m : inner.medoids) mapped.push_back(view.original(m));
        MedoidSet medoids(std::move(mapped), n);
        const double loss = total_deviation(d, medoids);
        if (!best || loss < best->loss) best = detail::full_data_result(d, std::move(medoids));
    }
    best->n_iterations = iterations;
    best->n_swaps = swaps;
    best->converged = converged;
    best->warnings = std::move(warnings);
    best->wall_time = detail::seconds_since(start);
    return *best;
}

/// CLARA with FasterPAM inside and the doubled sample size by default.
template <DissimilarityView V>
ClusteringResult fastclara(const V& d, std::size_t k, const ClaraConfig& config = ClaraConfig::fast_defaults()) {
    return clara(d, k, config);
}

/// CLARANS: num_local restarts from uniform random medoids. Each restart draws
/// random (slot, non-medoid) pairs, evaluates them with the change function
/// and swaps on any improvement; it stops after ceil(fraction * k(n-k))
/// consecutive failures. n_iterations counts evaluated pairs over all restarts.
template <DissimilarityView V>
ClusteringResult clarans(const V& d, std::size_t k, const ClaransConfig& config) {
    const auto start = detail::Clock::now();
    const std::size_t n = d.size();
    detail::require_k(k, n);
    if (k < 2) throw std::invalid_argument("need at least two medoids for swap-based optimization");
    if (config.num_local < 1) throw std::invalid_argument("num_local must be at least 1");
    const std::size_t budget = detail::attempt_budget(config.max_neighbor_fraction.value_or(0.0125), k * (n - k));

    std::optional<ClusteringResult> best;
    std::size_t attempts = 0, swaps = 0;
    for (std::size_t restart = 0; restart < config.num_local; ++restart) {
        Rng rng(derive_seed(config.seed, restart));
        MedoidSet medoids = init_random(d, k, rng.next());
        detail::SwapState<V> state(d, medoids, assign_nearest(d, medoids), OptimizerConfig{});
        for (std::size_t failures = 0; failures < budget;) {
            const Slot slot = rng.below(k);
            PointIndex candidate;
            do candidate = rng.below(n);
            while (state.is_medoid(candidate));
            ++attempts;
            const double delta = detail::change_sum(d, state.cache(), slot, candidate);
            if (delta < -improvement_threshold(state.loss())) {
                state.swap(slot, candidate, delta);
                failures = 0;
            } else {
                ++failures;
            }
        }
        swaps += state.n_swaps();
        ClusteringResult local = state.finish(0, true, start);
        if (!best || local.loss < best->loss) best = std::move(local);
    }
    best->n_iterations = attempts;
    best->n_swaps = swaps;
    best->wall_time = detail::seconds_since(start);
    return *best;
}

/// FastCLARANS: like clarans, but each attempt draws only a candidate and
/// evaluates all k slots at once, swapping with the best slot on improvement.
/// Restarts stop after ceil(fraction * (n-k)) consecutive failures.
template <DissimilarityView V>
ClusteringResult fastclarans(const V& d, std::size_t k, const ClaransConfig& config) {
    const auto start = detail::Clock::now();
    const std::size_t n = d.size();
    detail::require_k(k, n);
    if (k < 2) throw std::invalid_argument("need at least two medoids for swap-based optimization");
    if (config.num_local < 1) throw std::invalid_argument("num_local must be at least 1");
    const std::size_t budget = detail::attempt_budget(config.max_neighbor_fraction.value_or(0.025), n - k);

    std::optional<ClusteringResult> best;
    std::size_t attempts = 0, swaps = 0;
    SwapAccumulators acc;
    for (std::size_t restart = 0; restart < config.num_local; ++restart) {
        Rng rng(derive_seed(config.seed, restart));
        MedoidSet medoids = init_random(d, k, rng.next());
        detail::SwapState<V> state(d, medoids, assign_nearest(d, medoids), OptimizerConfig{});
        RemovalLossTable removal = removal_loss(state.cache());
        for (std::size_t failures = 0; failures < budget;) {
            PointIndex candidate;
            do candidate = rng.below(n);
            while (state.is_medoid(candidate));
            ++attempts;
            accumulate_swap(d, state.cache(), removal, candidate, acc);
            const Slot slot = acc.best_slot();
            const double delta = acc.delta(slot);
            if (delta < -improvement_threshold(state.loss())) {
                state.swap(slot, candidate, delta);
                removal = removal_loss(state.cache());
                failures = 0;
            } else {
                ++failures;
            }
        }
        swaps += state.n_swaps();
        ClusteringResult local = state.finish(0, true, start);
        if (!best || local.loss < best->loss) best = std::move(local);
    }
    best->n_iterations = attempts;
    best->n_swaps = swaps;
    best->wall_time = detail::seconds_since(start);
    return *best;
}

}  // namespace kmedoids
