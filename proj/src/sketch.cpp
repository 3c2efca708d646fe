#include "qireg/sketch.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qireg {

std::size_t choose_s(const SpectralBounds& bounds, double b_norm, double epsilon, double lambda) {
    if (!(epsilon > 0.0) || epsilon > 1.0) {
        throw std::invalid_argument("epsilon must lie in (0, 1]");
    }
    if (lambda < 0.0) throw std::invalid_argument("negative regularization parameter");
    if (b_norm == 0.0) return 1;
    bounds.validate();
    if (!(bounds.xstar_norm_lower > 0.0)) {
        throw std::invalid_argument("sketch size requires a positive xstar lower bound");
    }
    const double fro_sq = bounds.fro_norm * bounds.fro_norm;
    const double reg = bounds.sigma_lower * bounds.sigma_lower + lambda;
    const double ratio = b_norm / bounds.xstar_norm_lower;
    const double s = 800.0 * fro_sq * ratio * ratio / (reg * reg * epsilon * epsilon);
    if (!std::isfinite(s)) throw std::overflow_error("sketch size overflow");
    return static_cast<std::size_t>(std::ceil(s));
}

SparseVector sparsify_b(const SampledMatrix& a, const QueryVector& b, std::size_t s, Rng& rng,
                        QueryLedger& ledger) {
    if (a.fro_sq() <= 0.0) throw std::domain_error("cannot sketch against zero matrix");
    if (s == 0) throw std::invalid_argument("sketch size must be positive");
    if (b.size() != a.rows()) throw std::invalid_argument("rhs dimension mismatch");

    // Duplicates merge into counts: S^T S is diagonal.
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t k = 0; k < s; ++k) {
        ++counts[a.sample_row(rng, ledger)];
    }

    SparseVector out;
    out.dim = a.rows();
    out.indices.reserve(counts.size());
    out.values.reserve(counts.size());
    const double fro = a.fro_norm(ledger);
    const double fro_sq = fro * fro;
    for (const auto& [row, count] : counts) {
        const double rn = a.row_norm(row, ledger);
        const double value =
            static_cast<double>(count) * fro_sq / (static_cast<double>(s) * rn * rn) * b.query(row, ledger);
        if (value != 0.0) {
            out.indices.push_back(row);
            out.values.push_back(value);
        }
    }
    return out;
}

}  // namespace qireg
