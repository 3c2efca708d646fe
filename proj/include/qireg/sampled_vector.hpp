#pragma once

#include <cstddef>
#include <vector>

#include "qireg/ledger.hpp"
#include "qireg/rng.hpp"

namespace qireg {

/// Length-square sampling structure over a real vector: the stored values plus
/// a complete binary cumulative tree whose leaf i holds v_i^2. Immutable after
/// construction; read operations are safe to share across threads.
class SampledVector {
public:
    SampledVector() = default;
    explicit SampledVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    // Sample(): index i with probability v_i^2 / ||v||^2, by tree descent.
    std::size_t sample(Rng& rng, QueryLedger& ledger) const;

    // Query(i): the stored entry.
    double query(std::size_t i, QueryLedger& ledger) const;

    // Norm(): ||v||, exact.
    double norm(QueryLedger& ledger) const;

    // Unledgered accessors for construction, oracles, and tests.
    double value(std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const noexcept { return values_; }
    double sqnorm() const noexcept { return sqnorm_; }

    // Bottom-up recomputation of the tree; true when every internal node
    // matches the sum of its children to rel_tol.
    bool tree_consistent(double rel_tol = 1e-12) const;

    // ceil(log2 n): tree reads consumed by one sample.
    std::size_t descent_depth() const noexcept { return depth_; }

private:
    friend class SampledMatrix;

    // Tree descent without attributing a query kind; callers record the kind.
    std::size_t descend(Rng& rng, QueryLedger& ledger) const;

    std::vector<double> values_;
    std::vector<double> tree_;  // heap layout, root at 1, leaves at [base_, base_ + n)
    std::size_t base_ = 0;
    std::size_t depth_ = 0;
    double sqnorm_ = 0.0;
};

}  // namespace qireg
