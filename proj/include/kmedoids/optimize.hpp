#pragma once

// Swap-based refinement (PAM SWAP, FastPAM1, EagerPAM, FasterPAM) and the
// k-means style Alternating heuristic.

#include "kmedoids/dissimilarity.hpp"
#include "kmedoids/model.hpp"
#include "kmedoids/objective.hpp"

#include <chrono>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmedoids {

enum class Algorithm { Pam, FastPam1, EagerPam, FasterPam, Alternating };

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::FasterPam;
    std::size_t max_iterations = 2000;
    /// After every swap, recompute TD and the cache from scratch and throw
    /// std::logic_error on disagreement. Meant for tests.
    bool check_invariants = false;
};

/// Per-candidate accumulators: a shared term for the gain of adding the
/// candidate and one entry per medoid slot, seeded with the removal loss.
struct SwapAccumulators {
    double delta_td_plus = 0.0;
    std::vector<double> per_medoid;

    Slot best_slot() const noexcept {
        Slot best = 0;
        for (Slot i = 1; i < per_medoid.size(); ++i) {
            if (per_medoid[i] < per_medoid[best]) best = i;
        }
        return best;
    }
    double delta(Slot slot) const noexcept { return per_medoid[slot] + delta_td_plus; }
};

/// Single pass over the points computing the swap delta of `candidate`
/// against every medoid slot at once.
template <DissimilarityView V>
void accumulate_swap(const V& d, const AssignmentCache& cache, const RemovalLossTable& removal,
                     PointIndex candidate, SwapAccumulators& acc) {
    acc.per_medoid.assign(removal.begin(), removal.end());
    double plus = 0.0;
    double* per = acc.per_medoid.data();
    const std::size_t n = d.size();
    const Slot* nearest = cache.nearest.data();
    const double* dn = cache.d_nearest.data();
    const double* ds = cache.d_second.data();
    for (PointIndex o = 0; o < n; ++o) {
        const double doj = d(candidate, o);
        if (doj < dn[o]) {
            plus += doj - dn[o];
            per[nearest[o]] += dn[o] - ds[o];
        } else if (doj < ds[o]) {
            per[nearest[o]] += doj - ds[o];
        }
    }
    acc.delta_td_plus = plus;
}

/// Smallest loss decrease accepted as an improvement. Rounding can turn
/// zero-gain swaps into deltas like -4e-16, which then cycle forever.
inline double improvement_threshold(double loss) noexcept { return 1e-12 * std::max(1.0, std::abs(loss)); }

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

inline void require_swap_k(const MedoidSet& medoids) {
    if (medoids.size() < 2) throw std::invalid_argument("need at least two medoids for swap-based optimization");
}

inline void require_iterations(const OptimizerConfig& config) {
    if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
}

// Mutable state of one optimizer run.
template <DissimilarityView V>
class SwapState {
  public:
    SwapState(const V& d, MedoidSet medoids, AssignmentCache cache, const OptimizerConfig& config)
        : d_(d), medoids_(std::move(medoids)), cache_(std::move(cache)), config_(config),
          is_medoid_(d.size(), false) {
        if (cache_.size() != d.size() || cache_.k != medoids_.size()) {
            throw std::invalid_argument("assignment cache does not match the medoid set");
        }
        for (PointIndex m : medoids_) is_medoid_[m] = true;
        loss_ = cached_loss();
    }

    const V& view() const noexcept { return d_; }
    const MedoidSet& medoids() const noexcept { return medoids_; }
    const AssignmentCache& cache() const noexcept { return cache_; }
    bool is_medoid(PointIndex p) const noexcept { return is_medoid_[p]; }
    double loss() const noexcept { return loss_; }
    std::size_t n_swaps() const noexcept { return trace_.size(); }

    void swap(Slot slot, PointIndex candidate, double delta) {
        const PointIndex removed = medoids_[slot];
        apply_swap(d_, medoids_, cache_, slot, candidate);
        is_medoid_[removed] = false;
        is_medoid_[candidate] = true;
        loss_ += delta;
        trace_.push_back({slot, removed, candidate, delta, loss_});
        if (config_.check_invariants) verify();
    }

    ClusteringResult finish(std::size_t iterations, bool converged, Clock::time_point start) {
        ClusteringResult result;
        result.loss = cached_loss();
        result.medoids = medoids_.indices();
        result.assignment = cache_.nearest;
        result.n_iterations = iterations;
        result.n_swaps = trace_.size();
        result.converged = converged;
        result.trace = std::move(trace_);
        result.wall_time = seconds_since(start);
        return result;
    }

  private:
    double cached_loss() const {
        double td = 0.0;
        for (double v : cache_.d_nearest) td += v;
        return td;
    }

    void verify() const {
        const double fresh = total_deviation(d_, medoids_);
        if (std::abs(fresh - loss_) > 1e-9 * std::max(1.0, std::abs(fresh))) {
            throw std::logic_error("incremental loss " + std::to_string(loss_) + " disagrees with recomputed " +
                                   std::to_string(fresh));
        }
        if (!(assign_nearest(d_, medoids_) == cache_)) throw std::logic_error("assignment cache out of sync");
        for (PointIndex o = 0; o < cache_.size(); ++o) {
            if (cache_.d_nearest[o] > cache_.d_second[o] || cache_.nearest[o] == cache_.second[o]) {
                throw std::logic_error("assignment cache invariant violated at point " + std::to_string(o));
            }
        }
    }

    const V& d_;
    MedoidSet medoids_;
    AssignmentCache cache_;
    OptimizerConfig config_;
    std::vector<bool> is_medoid_;
    double loss_ = 0.0;
    std::vector<SwapRecord> trace_;
};

// Delta TD of (slot, candidate) by the four-case change function.
template <DissimilarityView V>
double change_sum(const V& d, const AssignmentCache& cache, Slot slot, PointIndex candidate) {
    double delta = 0.0;
    const std::size_t n = d.size();
    const Slot* nearest = cache.nearest.data();
    const double* dn = cache.d_nearest.data();
    const double* ds = cache.d_second.data();
    for (PointIndex o = 0; o < n; ++o) delta += swap_change(d(candidate, o), nearest[o], dn[o], ds[o], slot);
    return delta;
}

}  // namespace detail

/// PAM SWAP: steepest descent. Each iteration evaluates all k(n-k) swaps with
/// the change function and performs the best one if it is strictly negative.
/// Ties go to the smaller slot, then the smaller candidate index.
template <DissimilarityView V>
ClusteringResult pam_swap(const V& d, MedoidSet medoids, AssignmentCache cache, const OptimizerConfig& config) {
    detail::require_swap_k(medoids);
    detail::require_iterations(config);
    const auto start = detail::Clock::now();
    detail::SwapState<V> state(d, std::move(medoids), std::move(cache), config);
    const std::size_t n = d.size(), k = state.medoids().size();
    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        double best_delta = -improvement_threshold(state.loss());
        Slot best_slot = 0;
        PointIndex best_candidate = n;
        for (Slot i = 0; i < k; ++i) {
            for (PointIndex c = 0; c < n; ++c) {
                if (state.is_medoid(c)) continue;
                const double delta = detail::change_sum(d, state.cache(), i, c);
                if (delta < best_delta) best_delta = delta, best_slot = i, best_candidate = c;
            }
        }
        if (best_candidate == n) return state.finish(iter, true, start);
        state.swap(best_slot, best_candidate, best_delta);
    }
    return state.finish(config.max_iterations, false, start);
}

/// FastPAM1: the same swap sequence as pam_swap, found with one pass over the
/// points per candidate instead of one per (medoid, candidate) pair.
template <DissimilarityView V>
ClusteringResult fastpam1_swap(const V& d, MedoidSet medoids, AssignmentCache cache, const OptimizerConfig& config) {
    detail::require_swap_k(medoids);
    detail::require_iterations(config);
    const auto start = detail::Clock::now();
    detail::SwapState<V> state(d, std::move(medoids), std::move(cache), config);
    const std::size_t n = d.size();
    SwapAccumulators acc;
    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        const RemovalLossTable removal = removal_loss(state.cache());
        double best_delta = -improvement_threshold(state.loss());
        Slot best_slot = 0;
        PointIndex best_candidate = n;
        for (PointIndex c = 0; c < n; ++c) {
            if (state.is_medoid(c)) continue;
            accumulate_swap(d, state.cache(), removal, c, acc);
            const Slot slot = acc.best_slot();
            const double delta = acc.delta(slot);
            // Candidates arrive in ascending order, so only the slot needs an explicit tie break.
            if (delta < best_delta || (delta == best_delta && best_candidate != n && slot < best_slot)) {
                best_delta = delta, best_slot = slot, best_candidate = c;
            }
        }
        if (best_candidate == n) return state.finish(iter, true, start);
        state.swap(best_slot, best_candidate, best_delta);
    }
    return state.finish(config.max_iterations, false, start);
}

/// EagerPAM: PAM's loop order (slots outer, candidates inner) executing every
/// strictly improving swap immediately. One iteration is one full pass; the
/// run converges on a pass without any swap.
template <DissimilarityView V>
ClusteringResult eager_pam_swap(const V& d, MedoidSet medoids, AssignmentCache cache,
                                const OptimizerConfig& config) {
    detail::require_swap_k(medoids);
    detail::require_iterations(config);
    const auto start = detail::Clock::now();
    detail::SwapState<V> state(d, std::move(medoids), std::move(cache), config);
    const std::size_t n = d.size(), k = state.medoids().size();
    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        const std::size_t swaps_before = state.n_swaps();
        for (Slot i = 0; i < k; ++i) {
            for (PointIndex c = 0; c < n; ++c) {
                if (state.is_medoid(c)) continue;
                const double delta = detail::change_sum(d, state.cache(), i, c);
                if (delta < -improvement_threshold(state.loss())) state.swap(i, c, delta);
            }
        }
        if (state.n_swaps() == swaps_before) return state.finish(iter, true, start);
    }
    return state.finish(config.max_iterations, false, start);
}

/// FasterPAM: FastPAM1 accumulators with eager swapping. Candidates are
/// scanned in ascending index order with wrap-around; each is swapped with its
/// best slot when that improves the loss. The run ends when the scan comes
/// back to the last swapped-in candidate without any further improvement.
template <DissimilarityView V>
ClusteringResult fasterpam_swap(const V& d, MedoidSet medoids, AssignmentCache cache,
                                const OptimizerConfig& config) {
    detail::require_swap_k(medoids);
    detail::require_iterations(config);
    const auto start = detail::Clock::now();
    detail::SwapState<V> state(d, std::move(medoids), std::move(cache), config);
    const std::size_t n = d.size();
    RemovalLossTable removal = removal_loss(state.cache());
    SwapAccumulators acc;
    PointIndex last = n;  // invalid until the first swap
    for (std::size_t iter = 1; iter <= config.max_iterations; ++iter) {
        const std::size_t swaps_before = state.n_swaps();
        for (PointIndex c = 0; c < n; ++c) {
            if (c == last) break;
            if (state.is_medoid(c)) continue;
            accumulate_swap(d, state.cache(), removal, c, acc);
            const Slot slot = acc.best_slot();
            const double delta = acc.delta(slot);
            if (delta < -improvement_threshold(state.loss())) {
                state.swap(slot, c, delta);
                removal = removal_loss(state.cache());
                last = c;
            }
        }
        if (state.n_swaps() == swaps_before) return state.finish(iter, true, start);
    }
    return state.finish(config.max_iterations, false, start);
}

/// Alternating ("k-means style") heuristic: assign points to the nearest
/// medoid, then move each medoid to its cluster's medoid, until no medoid
/// changes. Empty clusters keep their medoid; a medoid only moves when another
/// member has a strictly smaller distance sum. n_swaps counts medoid moves;
/// trace records of one round share the round's loss change.
template <DissimilarityView V>
ClusteringResult alternating(const V& d, MedoidSet medoids, const OptimizerConfig& config) {
    detail::require_iterations(config);
    const auto start = detail::Clock::now();
    const std::size_t n = d.size(), k = medoids.size();
    ClusteringResult result;
    bool converged = false;
    std::size_t iter = 0;
    std::vector<std::vector<PointIndex>> members(k);
    double previous_td = total_deviation(d, medoids);
    std::size_t round_start = 0;
    while (iter < config.max_iterations) {
        ++iter;
        const std::vector<Slot> assignment = nearest_slots(d, medoids);
        for (auto& m : members) m.clear();
        for (PointIndex o = 0; o < n; ++o) members[assignment[o]].push_back(o);
        bool changed = false;
        for (Slot i = 0; i < k; ++i) {
            if (members[i].empty()) continue;
            const PointIndex candidate = medoid_of_set(d, std::span<const PointIndex>(members[i]));
            if (candidate == medoids[i]) continue;
            if (distance_sum(d, std::span<const PointIndex>(members[i]), candidate) <
                distance_sum(d, std::span<const PointIndex>(members[i]), medoids[i])) {
                const PointIndex removed = medoids[i];
                medoids.replace(i, candidate);
                result.trace.push_back({i, removed, candidate, 0.0, 0.0});
                changed = true;
            }
        }
        if (!changed) {
            converged = true;
            break;
        }
        const double td = total_deviation(d, medoids);
        if (config.check_invariants && td > previous_td) {
            throw std::logic_error("alternating round increased the loss");
        }
        for (std::size_t r = round_start; r < result.trace.size(); ++r) {
            result.trace[r].delta = td - previous_td;
            result.trace[r].loss_after = td;
        }
        previous_td = td;
        round_start = result.trace.size();
    }
    result.medoids = medoids.indices();
    result.assignment = nearest_slots(d, medoids);
    result.loss = total_deviation(d, medoids);
    result.n_iterations = iter;
    result.n_swaps = result.trace.size();
    result.converged = converged;
    result.wall_time = detail::seconds_since(start);
    return result;
}

template <DissimilarityView V>
ClusteringResult pam_swap(const V& d, MedoidSet medoids, const OptimizerConfig& config) {
    AssignmentCache cache = assign_nearest(d, medoids);
    return pam_swap(d, std::move(medoids), std::move(cache), config);
}

template <DissimilarityView V>
ClusteringResult fastpam1_swap(const V& d, MedoidSet medoids, const OptimizerConfig& config) {
    AssignmentCache cache = assign_nearest(d, medoids);
    return fastpam1_swap(d, std::move(medoids), std::move(cache), config);
}

template <DissimilarityView V>
ClusteringResult eager_pam_swap(const V& d, MedoidSet medoids, const OptimizerConfig& config) {
    AssignmentCache cache = assign_nearest(d, medoids);
    return eager_pam_swap(d, std::move(medoids), std::move(cache), config);
}

template <DissimilarityView V>
ClusteringResult fasterpam_swap(const V& d, MedoidSet medoids, const OptimizerConfig& config) {
    AssignmentCache cache = assign_nearest(d, medoids);
    return fasterpam_swap(d, std::move(medoids), std::move(cache), config);
}

/// Runs config.algorithm from the given medoids.
template <DissimilarityView V>
ClusteringResult optimize(const V& d, MedoidSet medoids, const OptimizerConfig& config) {
    switch (config.algorithm) {
        case Algorithm::Pam: return pam_swap(d, std::move(medoids), config);
        case Algorithm::FastPam1: return fastpam1_swap(d, std::move(medoids), config);
        case Algorithm::EagerPam: return eager_pam_swap(d, std::move(medoids), config);
        case Algorithm::FasterPam: return fasterpam_swap(d, std::move(medoids), config);
        case Algorithm::Alternating: return alternating(d, std::move(medoids), config);
    }
    throw std::invalid_argument("unknown algorithm");
}

}  // namespace kmedoids
