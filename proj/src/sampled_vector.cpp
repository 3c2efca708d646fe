#include "qireg/sampled_vector.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qireg {

SampledVector::SampledVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("empty vector");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("non-finite entry at index " + std::to_string(i));
        }
    }
    base_ = std::bit_ceil(values_.size());
    depth_ = static_cast<std::size_t>(std::countr_zero(base_));
    tree_.assign(2 * base_, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        tree_[base_ + i] = values_[i] * values_[i];
    }
    for (std::size_t k = base_ - 1; k >= 1; --k) {
        tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
    }
    sqnorm_ = tree_[1];
}

std::size_t SampledVector::descend(Rng& rng, QueryLedger& ledger) const {
    if (sqnorm_ <= 0.0) {
        throw std::domain_error("cannot sample zero vector");
    }
    double u = rng.uniform01() * sqnorm_;
    std::size_t node = 1;
    double node_mass = sqnorm_;
    while (node < base_) {
        const double left = tree_[2 * node];
        const double right = node_mass - left;
        // boundary draws descend right; degenerate subtrees are never entered
        if (right <= 0.0 || (u < left && left > 0.0)) {
            node = 2 * node;
            node_mass = left;
        } else {
            u -= left;
            node = 2 * node + 1;
            node_mass = right;
        }
    }
    ledger.add_tree_reads(depth_);
    return node - base_;
}

std::size_t SampledVector::sample(Rng& rng, QueryLedger& ledger) const {
    const std::size_t i = descend(rng, ledger);
    ledger.add_sample();
    return i;
}

double SampledVector::query(std::size_t i, QueryLedger& ledger) const {
    if (i >= values_.size()) {
        throw std::out_of_range("vector index " + std::to_string(i) + " out of range");
    }
    ledger.add_query();
    return values_[i];
}

double SampledVector::norm(QueryLedger& ledger) const {
    ledger.add_norm();
    return std::sqrt(sqnorm_);
}

bool SampledVector::tree_consistent(double rel_tol) const {
    for (std::size_t k = 1; k < base_; ++k) {
        const double expect = tree_[2 * k] + tree_[2 * k + 1];
        const double scale = std::max(std::abs(expect), std::abs(tree_[k]));
        if (std::abs(tree_[k] - expect) > rel_tol * std::max(scale, 1e-300)) {
            return false;
        }
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double sq = values_[i] * values_[i];
        if (std::abs(tree_[base_ + i] - sq) > rel_tol * std::max(sq, 1e-300)) {
            return false;
        }
    }
    return true;
}

}  // namespace qireg
