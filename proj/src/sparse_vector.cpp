#include "qireg/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qireg {

double SparseVector::norm_sq() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
}

double SparseVector::at(std::size_t i) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), i);
    if (it == indices.end() || *it != i) return 0.0;
    return values[static_cast<std::size_t>(it - indices.begin())];
}

std::vector<double> SparseVector::to_dense() const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] = values[k];
    return out;
}

void SparseVector::validate() const {
    if (indices.size() != values.size()) {
        throw std::invalid_argument("sparse vector index/value length mismatch");
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= dim) throw std::invalid_argument("sparse vector index out of range");
        if (k > 0 && indices[k] <= indices[k - 1]) {
            throw std::invalid_argument("sparse vector indices not strictly increasing");
        }
        if (!std::isfinite(values[k])) throw std::invalid_argument("sparse vector value not finite");
    }
}

}  // namespace qireg
