#pragma once

#include <cstddef>
#include <vector>

#include "qireg/ledger.hpp"
#include "qireg/rng.hpp"
#include "qireg/sampled_vector.hpp"

namespace qireg {

/// Length-square sampling structure over a real m x n matrix: one SampledVector
/// per row plus a SampledVector over the row norms. Supports the row sampler,
/// the within-row column sampler, entry queries, row norms, and the Frobenius
/// norm. Immutable after construction.
class SampledMatrix {
public:
    SampledMatrix() = default;
    explicit SampledMatrix(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return row_data_.size(); }
    std::size_t cols() const noexcept { return cols_; }

    // Sample1(): row i with probability ||A_{i,*}||^2 / ||A||_F^2.
    std::size_t sample_row(Rng& rng, QueryLedger& ledger) const;

    // Sample2(i): column j with probability A_{i,j}^2 / ||A_{i,*}||^2.
    std::size_t sample_col(std::size_t i, Rng& rng, QueryLedger& ledger) const;

    // Query(i, j)
    double entry(std::size_t i, std::size_t j, QueryLedger& ledger) const;

    // Norm(i): ||A_{i,*}||
    double row_norm(std::size_t i, QueryLedger& ledger) const;

    // Norm(): ||A||_F
    double fro_norm(QueryLedger& ledger) const;

    // Unledgered accessors for construction, oracles, and tests.
    double value(std::size_t i, std::size_t j) const { return row_data_[i].value(j); }
    double row_sqnorm(std::size_t i) const { return row_data_[i].sqnorm(); }
    double fro_sq() const noexcept { return fro_sq_; }
    const SampledVector& row(std::size_t i) const { return row_data_[i]; }
    const SampledVector& row_norms() const noexcept { return row_norms_; }

private:
    void check_row(std::size_t i) const;

    std::vector<SampledVector> row_data_;
    SampledVector row_norms_;
    std::size_t cols_ = 0;
    double fro_sq_ = 0.0;
};

}  // namespace qireg
