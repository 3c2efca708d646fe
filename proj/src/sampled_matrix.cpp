#include "qireg/sampled_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qireg {

SampledMatrix::SampledMatrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw std::invalid_argument("empty matrix");
    }
    cols_ = rows.front().size();
    row_data_.reserve(rows.size());
    std::vector<double> norms;
    norms.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols_) {
            throw std::invalid_argument("ragged row " + std::to_string(i) + ": expected " +
                                        std::to_string(cols_) + " entries, got " +
                                        std::to_string(rows[i].size()));
        }
        row_data_.emplace_back(rows[i]);
        norms.push_back(std::sqrt(row_data_.back().sqnorm()));
    }
    row_norms_ = SampledVector(std::move(norms));
    fro_sq_ = row_norms_.sqnorm();
}

void SampledMatrix::check_row(std::size_t i) const {
    if (i >= row_data_.size()) {
        throw std::out_of_range("row index " + std::to_string(i) + " out of range");
    }
}

std::size_t SampledMatrix::sample_row(Rng& rng, QueryLedger& ledger) const {
    if (fro_sq_ <= 0.0) {
        throw std::domain_error("cannot sample zero matrix");
    }
    const std::size_t i = row_norms_.descend(rng, ledger);
    ledger.add_sample1();
    return i;
}

std::size_t SampledMatrix::sample_col(std::size_t i, Rng& rng, QueryLedger& ledger) const {
    check_row(i);
    if (row_data_[i].sqnorm() <= 0.0) {
        throw std::domain_error("cannot sample zero row " + std::to_string(i));
    }
    const std::size_t j = row_data_[i].descend(rng, ledger);
    ledger.add_sample2();
    return j;
}

double SampledMatrix::entry(std::size_t i, std::size_t j, QueryLedger& ledger) const {
    check_row(i);
    if (j >= cols_) {
        throw std::out_of_range("column index " + std::to_string(j) + " out of range");
    }
    ledger.add_query();
    return row_data_[i].value(j);
}

double SampledMatrix::row_norm(std::size_t i, QueryLedger& ledger) const {
    check_row(i);
    ledger.add_norm();
    return row_norms_.value(i);
}

double SampledMatrix::fro_norm(QueryLedger& ledger) const {
    ledger.add_norm();
    return std::sqrt(fro_sq_);
}

}  // namespace qireg
