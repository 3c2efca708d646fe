#pragma once

#include <cstddef>
#include <vector>

namespace qireg {

/// Canonical sparse vector: strictly increasing in-range indices with matching
/// finite values.
struct SparseVector {
    std::size_t dim = 0;
    std::vector<std::size_t> indices;
    std::vector<double> values;

    std::size_t nnz() const noexcept { return indices.size(); }

    double norm_sq() const;
    // entry lookup by binary search; zero off support
    double at(std::size_t i) const;
    std::vector<double> to_dense() const;

    // throws when the canonical-form invariants are violated
    void validate() const;
};

}  // namespace qireg
