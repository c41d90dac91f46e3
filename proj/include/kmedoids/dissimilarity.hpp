#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmedoids {

using PointIndex = std::size_t;

/// Anything that answers "how far is i from j" for i, j in [0, size()).
/// Algorithms are written against this so CLARA samples and shuffled
/// benchmark inputs can reuse one shared matrix without copying.
template <typename V>
concept DissimilarityView = requires(const V& view, std::size_t i) {
    { view.size() } -> std::convertible_to<std::size_t>;
    { view(i, i) } -> std::convertible_to<double>;
};

/// Dense, immutable n x n dissimilarity table (row-major, 64-bit floats).
///
/// Construction validates a zero diagonal, nonnegative finite entries and
/// symmetry. Pairs that differ by at most 1e-12 * max(1, d) are set to the
/// larger value; anything further apart is rejected.
class DissimilarityMatrix {
  public:
    DissimilarityMatrix(std::size_t n, std::vector<double> values);

    template <typename F>
    static DissimilarityMatrix from_function(std::size_t n, F&& distance) {
        std::vector<double> values(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = distance(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        return DissimilarityMatrix(n, std::move(values));
    }

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * n_, n_}; }
    std::span<const double> values() const noexcept { return values_; }

  private:
    std::size_t n_;
    std::vector<double> values_;
};

/// Any view seen through an index map: view(i, j) = base(map[i], map[j]).
/// Used for subsamples (CLARA) and for input-order permutations. The base
/// must outlive the view.
template <DissimilarityView Base>
class SubsetView {
  public:
    SubsetView(const Base& base, std::vector<PointIndex> map) : base_(&base), map_(std::move(map)) {
        for (PointIndex p : map_) {
            if (p >= base.size()) throw std::invalid_argument("view index " + std::to_string(p) + " out of range");
        }
    }

    std::size_t size() const noexcept { return map_.size(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return (*base_)(map_[i], map_[j]); }

    PointIndex original(std::size_t i) const noexcept { return map_[i]; }
    const std::vector<PointIndex>& map() const noexcept { return map_; }

  private:
    const Base* base_;
    std::vector<PointIndex> map_;
};

using IndexedView = SubsetView<DissimilarityMatrix>;

}  // namespace kmedoids
