#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qireg/dense_matrix.hpp"
#include "qireg/ledger.hpp"
#include "qireg/oracle.hpp"
#include "qireg/rng.hpp"
#include "qireg/sampled_matrix.hpp"
#include "qireg/sketch.hpp"
#include "qireg/sparse_vector.hpp"

namespace qireg {

// Precondition on the regularizer: lambda <= kMaxLambdaFactor * ||A||_F ||A||.
inline constexpr double kMaxLambdaFactor = 16.0;

struct HyperParams {
    double eta = 0.0;                // step size
    std::uint64_t iterations = 0;    // T
    std::size_t col_samples = 0;     // column draws per iteration (C)
    std::size_t sketch_size = 0;     // rhs sketch size (s)
    double lambda = 0.0;
    double epsilon = 0.0;

    void validate() const;
};

// eta  = eps^2 (sigma^2 + lambda) / (32 ||A||_F^2 ||A||^2 + 16 lambda^2)
// T    = ceil( ln(8 / eps^2) / (eta (sigma^2 + lambda)) )
// C    = ceil( ||A||_F^2 / ||A||^2 )
// s    = choose_s(bounds, b_norm, eps, lambda)
// evaluated on the supplied bounds; looser bounds increase T, C, s and
// decrease eta without affecting correctness.
HyperParams derive_hyperparams(const SpectralBounds& bounds, double epsilon, double lambda,
                               double b_norm);

struct GradientSupport {
    std::size_t row = 0;
    std::vector<std::size_t> cols;
};

// Row index from the row-norm distribution, then col_samples i.i.d. column
// indices from the row's length-square distribution.
GradientSupport sample_gradient_support(const SampledMatrix& a, std::size_t col_samples, Rng& rng,
                                        QueryLedger& ledger);

struct SolverState {
    std::unordered_map<std::size_t, double> v;  // coefficient iterate, dimension m
    std::uint64_t t = 0;

    SparseVector canonical(std::size_t dim) const;  // sorted, denormals dropped
};

// One iteration of the coefficient update
//   v <- (1 - eta lambda) v + eta b_hat - eta (||A||_F^2 / C) sum_j <A_{*,c_j}, v> / A_{r,c_j} e_r,
// with every inner product evaluated over supp(v) via entry queries.
void apply_update(SolverState& state, const GradientSupport& support, const SparseVector& b_hat,
                  const HyperParams& hp, const SampledMatrix& a, QueryLedger& ledger);

// Randomized-Kaczmarz flavor: the sketched rhs term is replaced by
// (||A||_F^2 / ||A_{r,*}||^2) b_r e_r, read on demand. Requires lambda = 0.
void apply_update_kaczmarz(SolverState& state, const GradientSupport& support, double b_r,
                           const HyperParams& hp, const SampledMatrix& a, QueryLedger& ledger);

enum class SolveMode { standard, kaczmarz };

// Optional instrumentation: exact error trace against a known optimum,
// computed from the dense matrix outside the query accounting.
struct TraceOptions {
    const DenseMatrix* dense_a = nullptr;
    const std::vector<double>* xstar = nullptr;
    std::size_t points = 33;
};

struct SolveOutcome {
    SparseVector v;               // canonical description coefficients
    std::uint64_t iterations = 0;
    std::size_t b_hat_nnz = 0;
    bool sketch_bypassed = false;  // s >= m: the rhs was used as-is
    bool sparsity_law_ok = true;   // nnz(v_t) <= t + nnz(b_hat) at every t
    LedgerCounts sketch_counts;
    LedgerCounts solve_counts;
    std::vector<std::pair<std::uint64_t, double>> error_trace;  // (t, ||x_t - x*||^2)
    double wall_seconds = 0.0;
};

// Algorithm: sparsify the rhs (standard mode), then run hp.iterations updates
// from v = 0. The solver touches the matrix only through sampling and queries.
SolveOutcome solve(const SampledMatrix& a, const QueryVector& b, const HyperParams& hp, Rng& rng,
                   SolveMode mode, QueryLedger& ledger, const TraceOptions* trace = nullptr);

// ---------------------------------------------------------------------------
// Dense evaluation utilities for verification. These mirror the stochastic
// gradient exactly at desk scale and never feed the solver path.

// One realization of the stochastic gradient at x.
std::vector<double> stochastic_gradient_x(const DenseMatrix& a, const std::vector<double>& b,
                                          double lambda, const std::vector<double>& x,
                                          std::size_t col_samples, Rng& rng);

struct GradientMoments {
    std::vector<double> mean;
    double variance = 0.0;  // E||g - E g||^2
};

// Exact moments by enumerating every (row, column) realization at C = 1.
GradientMoments enumerate_gradient_moments(const DenseMatrix& a, const std::vector<double>& b,
                                           double lambda, const std::vector<double>& x);

// E||g(x) - g(y)||^2 with both gradients sharing the same realization, C = 1.
double enumerate_gradient_diff_sq(const DenseMatrix& a, const std::vector<double>& b, double lambda,
                                  const std::vector<double>& x, const std::vector<double>& y);

struct VSpaceMoments {
    std::vector<double> mean;   // A A^T v - b + lambda v
    double d_variance = 0.0;    // E||g~ - E g~||_D^2 at the requested batch size
};

// Moments of the coefficient-space gradient in the row-norm weighted norm;
// the C = 1 second moment is enumerated and the batch dependence applied
// analytically.
VSpaceMoments v_space_gradient_moments(const DenseMatrix& a, const std::vector<double>& b,
                                       double lambda, const std::vector<double>& v,
                                       std::size_t col_samples);

}  // namespace qireg
