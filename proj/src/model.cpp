#include "kmedoids/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace kmedoids {

MedoidSet::MedoidSet(std::vector<PointIndex> indices, std::size_t n) : indices_(std::move(indices)) {
    const std::size_t k = indices_.size();
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (k >= n) {
        throw std::invalid_argument("k must be smaller than the number of points (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
    std::vector<bool> seen(n, false);
    for (PointIndex p : indices_) {
        if (p >= n) throw std::invalid_argument("medoid index " + std::to_string(p) + " out of range");
        if (seen[p]) throw std::invalid_argument("duplicate medoid index " + std::to_string(p));
        seen[p] = true;
    }
}

bool MedoidSet::contains(PointIndex point) const noexcept {
    return std::find(indices_.begin(), indices_.end(), point) != indices_.end();
}

}  // namespace kmedoids
