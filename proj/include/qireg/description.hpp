#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "qireg/ledger.hpp"
#include "qireg/rng.hpp"
#include "qireg/sampled_matrix.hpp"
#include "qireg/sparse_vector.hpp"

namespace qireg {

/// Sparse description of x = A^T v: support indices into the rows of A with
/// coefficients, plus the cached proposal mass Z = sum_k ||A_{i_k,*}||^2 v_k^2.
/// Grants entry queries, length-square sampling by rejection, and
/// multiplicative norm estimation over x without ever forming it.
///
/// The referenced SampledMatrix must outlive the description. Instances are
/// immutable; concurrent sampling with independent rngs is safe.
class SparseDescription {
public:
    // Coefficients on zero-norm rows contribute nothing to x and are dropped,
    // as are exact zeros. Passing a ledger charges the row-norm reads.
    SparseDescription(const SampledMatrix& a, SparseVector coefficients,
                      QueryLedger* ledger = nullptr);

    std::size_t dim() const noexcept { return a_->cols(); }
    std::size_t support_size() const noexcept { return v_.nnz(); }
    const SparseVector& coefficients() const noexcept { return v_; }
    double z() const noexcept { return z_; }
    const SampledMatrix& matrix() const noexcept { return *a_; }

    // x_j, via one entry query per support row.
    double query(std::size_t j, QueryLedger& ledger) const;

    // Index j with probability x_j^2 / ||x||^2 by rejection sampling.
    // max_trials = 0 selects ceil(100 s delta) with the cached cancellation
    // constant; exceeding the budget throws, reporting the measured rate.
    std::size_t sample(Rng& rng, QueryLedger& ledger, std::uint64_t max_trials = 0) const;

    // Fraction of accepted proposals over `trials` attempts; unbiased for
    // ||x||^2 / (s Z) and the building block of estimate_norm.
    double acceptance_rate(std::uint64_t trials, Rng& rng, QueryLedger& ledger) const;

    // ||x|| within a factor (1 +- eps_est) with probability >= 1 - delta,
    // via repeated acceptance-rate runs combined by median.
    double estimate_norm(double eps_est, double delta, Rng& rng, QueryLedger& ledger) const;

    // Cancellation constant Z / ||x||^2 with ||x||^2 evaluated exactly in
    // O(s n); pass a ledger to charge the entry queries.
    double delta(QueryLedger* ledger = nullptr) const;

    // Estimated cancellation constant through the norm estimator.
    double delta_estimated(double eps_est, double delta_fail, Rng& rng, QueryLedger& ledger) const;

    // Z recomputed from scratch agrees with the cache (validation hook).
    bool z_consistent(double rel_tol = 1e-12) const;

private:
    struct Proposal {
        std::size_t index = 0;  // proposed column j
        double ratio = 0.0;     // acceptance probability
    };
    Proposal propose(Rng& rng, QueryLedger& ledger) const;
    double cached_delta() const;

    const SampledMatrix* a_;
    SparseVector v_;
    std::vector<double> weight_prefix_;  // cumulative ||A_{i_k,*}||^2 v_k^2
    double z_ = 0.0;

    // negative until first computed; shared so copies reuse the value
    std::shared_ptr<std::atomic<double>> delta_cache_ =
        std::make_shared<std::atomic<double>>(-1.0);
};

}  // namespace qireg
