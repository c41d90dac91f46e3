#include "kmedoids/dissimilarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kmedoids {

namespace {

std::string pair_name(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

DissimilarityMatrix::DissimilarityMatrix(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
    if (n_ < 2) throw std::invalid_argument("a dissimilarity matrix needs at least 2 points");
    if (values_.size() != n_ * n_) {
        throw std::invalid_argument("expected " + std::to_string(n_ * n_) + " matrix entries, got " +
                                    std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (values_[i * n_ + i] != 0.0) throw std::invalid_argument("nonzero diagonal at " + pair_name(i, i));
        for (std::size_t j = i + 1; j < n_; ++j) {
            double& a = values_[i * n_ + j];
            double& b = values_[j * n_ + i];
            if (!std::isfinite(a) || !std::isfinite(b)) {
                throw std::invalid_argument("non-finite dissimilarity at " + pair_name(i, j));
            }
            if (a < 0.0 || b < 0.0) throw std::invalid_argument("negative dissimilarity at " + pair_name(i, j));
            const double hi = std::max(a, b);
            if (hi - std::min(a, b) > 1e-12 * std::max(1.0, hi)) {
                throw std::invalid_argument("asymmetric dissimilarity at " + pair_name(i, j));
            }
            a = hi;
            b = hi;
        }
    }
}

}  // namespace kmedoids
