#pragma once

#include <cstddef>
#include <vector>

#include "qireg/dense_matrix.hpp"

namespace qireg {

/// Singular value decomposition A = U diag(sigma) V^T restricted to the
/// numerically nonzero part. sigma holds all min(m,n) values in descending
/// order (zeros padded); U and V carry one column per value above
/// rank_tol * sigma_max.
struct Spectrum {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<double> sigma;  // length min(m, n), descending
    DenseMatrix u;              // m x rank
    DenseMatrix v;              // n x rank
    std::size_t rank = 0;

    double sigma_max() const { return sigma.empty() ? 0.0 : sigma.front(); }
    // smallest singular value treated as nonzero; 0 for the zero matrix
    double sigma_min_nonzero() const { return rank == 0 ? 0.0 : sigma[rank - 1]; }
};

// ||U S V^T - A||_F for verifying a computed spectrum against its source.
double reconstruction_error(const Spectrum& s, const DenseMatrix& a);

// Cutoff below which singular values are treated as zero, relative to sigma_max.
inline constexpr double kRankTol = 1e-10;

// Desk-scale cap for the dense reference path.
inline constexpr std::size_t kOracleDimCap = 2048;

// One-sided Jacobi (Hestenes) SVD. Intended for verification at desk scale;
// dimensions above kOracleDimCap are rejected.
Spectrum svd(const DenseMatrix& a);

}  // namespace qireg
