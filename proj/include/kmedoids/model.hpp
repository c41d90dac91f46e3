#pragma once

#include "kmedoids/dissimilarity.hpp"

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace kmedoids {

using Slot = std::size_t;

/// Ordered set of k distinct point indices; slot i holds medoid i.
class MedoidSet {
  public:
    /// Validates 1 <= k < n, every index < n, no duplicates.
    MedoidSet(std::vector<PointIndex> indices, std::size_t n);

    std::size_t size() const noexcept { return indices_.size(); }
    PointIndex operator[](Slot slot) const noexcept { return indices_[slot]; }
    const std::vector<PointIndex>& indices() const noexcept { return indices_; }
    auto begin() const noexcept { return indices_.begin(); }
    auto end() const noexcept { return indices_.end(); }

    bool contains(PointIndex point) const noexcept;

    /// Puts `point` into `slot`. The caller guarantees `point` is not a medoid.
    void replace(Slot slot, PointIndex point) noexcept { indices_[slot] = point; }

    friend bool operator==(const MedoidSet&, const MedoidSet&) = default;

  private:
    std::vector<PointIndex> indices_;
};

/// Per-point nearest and second-nearest medoid (by slot) and their distances.
///
/// Ordering between medoids for a point o uses the key
/// (distance, medoid != o, slot): smaller distance first, a point that is
/// itself a medoid prefers its own slot, then the smaller slot wins.
struct AssignmentCache {
    std::size_t k = 0;
    std::vector<Slot> nearest;
    std::vector<Slot> second;
    std::vector<double> d_nearest;
    std::vector<double> d_second;

    std::size_t size() const noexcept { return nearest.size(); }

    friend bool operator==(const AssignmentCache&, const AssignmentCache&) = default;
};

/// Loss increase from deleting each medoid and moving its members to their
/// second-nearest medoid.
using RemovalLossTable = std::vector<double>;

struct SwapRecord {
    Slot slot;
    PointIndex removed;
    PointIndex added;
    double delta;
    double loss_after;

    friend bool operator==(const SwapRecord&, const SwapRecord&) = default;
};

struct ClusteringResult {
    std::vector<PointIndex> medoids;
    std::vector<Slot> assignment;
    double loss = 0.0;
    std::size_t n_iterations = 0;
    std::size_t n_swaps = 0;
    double wall_time = 0.0;
    bool converged = true;
    std::vector<SwapRecord> trace;
    std::vector<std::string> warnings;
};

}  // namespace kmedoids
