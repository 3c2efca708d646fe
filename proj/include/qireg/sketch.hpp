#pragma once

#include <cstddef>

#include "qireg/ledger.hpp"
#include "qireg/oracle.hpp"
#include "qireg/rng.hpp"
#include "qireg/sampled_matrix.hpp"
#include "qireg/sparse_vector.hpp"

namespace qireg {

/// Query-only view of the right-hand side; entry reads are ledgered.
class QueryVector {
public:
    QueryVector() = default;
    explicit QueryVector(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double query(std::size_t i, QueryLedger& ledger) const {
        ledger.add_query();
        return values_[i];
    }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

// Sketch size for the right-hand side: ceil of
// 800 ||A||_F^2 ||b||^2 / ((sigma^2 + lambda)^2 eps^2 ||x*||^2),
// evaluated on the supplied bounds. Returns 1 when b = 0.
std::size_t choose_s(const SpectralBounds& bounds, double b_norm, double epsilon, double lambda);

// b_hat = S^T S b for an importance-sampling sketch S of A: draw s row indices
// i.i.d. with probability ||A_{i,*}||^2 / ||A||_F^2 and merge duplicates, so
// b_hat_i = count_i * ||A||_F^2 / (s ||A_{i,*}||^2) * b_i. Only Query access to
// b is used.
SparseVector sparsify_b(const SampledMatrix& a, const QueryVector& b, std::size_t s, Rng& rng,
                        QueryLedger& ledger);

}  // namespace qireg
