#pragma once

// Reference semantics of the k-medoids objective: total deviation, the
// medoid of a set, nearest/second-nearest assignment, and the per-object
// swap change function. The optimizers are tested against these.

#include "kmedoids/dissimilarity.hpp"
#include "kmedoids/model.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmedoids {

/// Sum over all points (ascending index) of the distance to the closest medoid.
template <DissimilarityView V>
double total_deviation(const V& d, const MedoidSet& medoids) {
    double td = 0.0;
    for (PointIndex o = 0; o < d.size(); ++o) {
        double best = std::numeric_limits<double>::infinity();
        for (PointIndex m : medoids) best = std::min(best, static_cast<double>(d(m, o)));
        td += best;
    }
    return td;
}

/// Sum of d(member, candidate) over members, accumulated in ascending member order.
template <DissimilarityView V>
double distance_sum(const V& d, std::span<const PointIndex> sorted_members, PointIndex candidate) {
    double sum = 0.0;
    for (PointIndex c : sorted_members) sum += d(candidate, c);
    return sum;
}

/// The member with the smallest dissimilarity sum to all members; ties go to
/// the smallest point index, independent of the order members are given in.
template <DissimilarityView V>
PointIndex medoid_of_set(const V& d, std::span<const PointIndex> members) {
    if (members.empty()) throw std::invalid_argument("empty cluster");
    std::vector<PointIndex> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    PointIndex best = sorted.front();
    double best_sum = std::numeric_limits<double>::infinity();
    for (PointIndex m : sorted) {
        const double sum = distance_sum(d, sorted, m);
        if (sum < best_sum) {
            best_sum = sum;
            best = m;
        }
    }
    return best;
}

namespace detail {

// Lexicographic (distance, not-self, slot) order used for every nearest-medoid decision.
inline bool closer(double da, bool a_self, Slot a, double db, bool b_self, Slot b) noexcept {
    if (da != db) return da < db;
    if (a_self != b_self) return a_self;
    return a < b;
}

// Full O(k) rescan of point o.
template <DissimilarityView V>
void scan_point(const V& d, const MedoidSet& medoids, PointIndex o, AssignmentCache& cache) {
    Slot n1 = 0, n2 = 0;
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    bool s1 = false, s2 = false;
    bool have1 = false, have2 = false;
    for (Slot j = 0; j < medoids.size(); ++j) {
        const double dj = d(medoids[j], o);
        const bool self = medoids[j] == o;
        if (!have1 || closer(dj, self, j, d1, s1, n1)) {
            n2 = n1, d2 = d1, s2 = s1, have2 = have1;
            n1 = j, d1 = dj, s1 = self, have1 = true;
        } else if (!have2 || closer(dj, self, j, d2, s2, n2)) {
            n2 = j, d2 = dj, s2 = self, have2 = true;
        }
    }
    cache.nearest[o] = n1;
    cache.d_nearest[o] = d1;
    cache.second[o] = n2;
    cache.d_second[o] = d2;
}

}  // namespace detail

/// Nearest and second-nearest medoid for every point. Requires k >= 2.
template <DissimilarityView V>
AssignmentCache assign_nearest(const V& d, const MedoidSet& medoids) {
    if (medoids.size() < 2) throw std::invalid_argument("need at least two medoids for swap-based optimization");
    const std::size_t n = d.size();
    AssignmentCache cache;
    cache.k = medoids.size();
    cache.nearest.assign(n, 0);
    cache.second.assign(n, 0);
    cache.d_nearest.assign(n, 0.0);
    cache.d_second.assign(n, 0.0);
    for (PointIndex o = 0; o < n; ++o) detail::scan_point(d, medoids, o, cache);
    return cache;
}

/// Nearest medoid slot per point under the same ordering as assign_nearest;
/// works for any k >= 1.
template <DissimilarityView V>
std::vector<Slot> nearest_slots(const V& d, const MedoidSet& medoids) {
    std::vector<Slot> out(d.size(), 0);
    for (PointIndex o = 0; o < d.size(); ++o) {
        Slot best = 0;
        double best_d = d(medoids[0], o);
        bool best_self = medoids[0] == o;
        for (Slot j = 1; j < medoids.size(); ++j) {
            const double dj = d(medoids[j], o);
            const bool self = medoids[j] == o;
            if (detail::closer(dj, self, j, best_d, best_self, best)) best = j, best_d = dj, best_self = self;
        }
        out[o] = best;
    }
    return out;
}

/// Loss change contributed by one object when the medoid in `slot` is replaced
/// by a candidate at distance `d_oc`: the four cases (a), (b1), (b2), (c).
inline double swap_change(double d_oc, Slot nearest, double d_n, double d_s, Slot slot) noexcept {
    if (nearest == slot) {
        return d_oc < d_s ? d_oc - d_n   // (b1)
                          : d_s - d_n;   // (b2)
    }
    return d_oc < d_n ? d_oc - d_n       // (c)
                      : 0.0;             // (a)
}

/// Delta TD of swapping `slot` with `candidate`, summed literally over all objects.
template <DissimilarityView V>
double swap_delta_oracle(const V& d, const AssignmentCache& cache, const MedoidSet& medoids, Slot slot,
                         PointIndex candidate) {
    if (slot >= medoids.size()) throw std::invalid_argument("medoid slot out of range");
    if (candidate >= d.size()) throw std::invalid_argument("candidate out of range");
    if (medoids.contains(candidate)) {
        throw std::invalid_argument("candidate " + std::to_string(candidate) + " is already a medoid");
    }
    double delta = 0.0;
    for (PointIndex o = 0; o < d.size(); ++o) {
        delta += swap_change(d(candidate, o), cache.nearest[o], cache.d_nearest[o], cache.d_second[o], slot);
    }
    return delta;
}

/// Replaces medoids[slot] by `candidate` and repairs the cache so that it is
/// identical to assign_nearest on the new medoid set.
template <DissimilarityView V>
void apply_swap(const V& d, MedoidSet& medoids, AssignmentCache& cache, Slot slot, PointIndex candidate) {
    if (medoids.contains(candidate)) {
        throw std::invalid_argument("candidate " + std::to_string(candidate) + " is already a medoid");
    }
    const PointIndex old = medoids[slot];
    medoids.replace(slot, candidate);
    for (PointIndex o = 0; o < d.size(); ++o) {
        const double dn = d(candidate, o);
        const bool self = candidate == o;
        const Slot n1 = cache.nearest[o], n2 = cache.second[o];
        const bool n1_self = medoids[n1] == o;
        const bool n2_self = medoids[n2] == o;
        if (n1 == slot) {
            if (detail::closer(dn, self, slot, cache.d_second[o], n2_self, n2)) {
                cache.d_nearest[o] = dn;
            } else {
                detail::scan_point(d, medoids, o, cache);
            }
        } else if (n2 == slot) {
            if (detail::closer(dn, self, slot, cache.d_nearest[o], n1_self, n1)) {
                cache.second[o] = n1;
                cache.d_second[o] = cache.d_nearest[o];
                cache.nearest[o] = slot;
                cache.d_nearest[o] = dn;
            } else if (!detail::closer(cache.d_second[o], old == o, slot, dn, self, slot)) {
                // New entry is not worse than the old second; everyone else already was.
                cache.d_second[o] = dn;
            } else {
                detail::scan_point(d, medoids, o, cache);
            }
        } else if (detail::closer(dn, self, slot, cache.d_nearest[o], n1_self, n1)) {
            cache.second[o] = n1;
            cache.d_second[o] = cache.d_nearest[o];
            cache.nearest[o] = slot;
            cache.d_nearest[o] = dn;
        } else if (detail::closer(dn, self, slot, cache.d_second[o], n2_self, n2)) {
            cache.second[o] = slot;
            cache.d_second[o] = dn;
        }
    }
}

/// One pass over the points: entry i sums d_second - d_nearest over members of slot i.
inline RemovalLossTable removal_loss(const AssignmentCache& cache) {
    RemovalLossTable loss(cache.k, 0.0);
    for (PointIndex o = 0; o < cache.size(); ++o) loss[cache.nearest[o]] += cache.d_second[o] - cache.d_nearest[o];
    return loss;
}

}  // namespace kmedoids
