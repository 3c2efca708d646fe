#pragma once

#include <cstddef>
#include <vector>

#include "qireg/dense_matrix.hpp"
#include "qireg/svd.hpp"

namespace qireg {

/// Spectral data the randomized solver is allowed to see: an upper bound on
/// the operator norm, lower bounds on the minimum nonzero singular value and
/// on the optimum's norm, and the exact Frobenius norm.
struct SpectralBounds {
    double op_norm_upper = 0.0;
    double sigma_lower = 0.0;
    double xstar_norm_lower = 0.0;  // may be 0 when b = 0
    double fro_norm = 0.0;

    void validate() const;  // throws on nonpositive op/sigma/fro or op < sigma
};

// x* = (A^T A + lambda I)^+ A^T b via the spectrum:
// x* = sum_i sigma_i / (sigma_i^2 + lambda) <u_i, b> v_i over nonzero sigma_i.
std::vector<double> solve_exact(const DenseMatrix& a, const std::vector<double>& b, double lambda);
std::vector<double> solve_exact(const Spectrum& s, const std::vector<double>& b, double lambda);

// grad f(x) = A^T A x - A^T b + lambda x
std::vector<double> grad_exact(const DenseMatrix& a, const std::vector<double>& b, double lambda,
                               const std::vector<double>& x);

// f(x) = (||Ax - b||^2 + lambda ||x||^2) / 2
double f_value(const DenseMatrix& a, const std::vector<double>& b, double lambda,
               const std::vector<double>& x);

// Attenuation factor of the thresholded projector: 0 at sigma = 0,
// 2 sigma sqrt(lambda) / (sigma^2 + lambda) on (0, sqrt(lambda)], 1 above.
double projector_weight(double sigma, double lambda);

// Pi_{A,lambda} = sum_i p(sigma_i) u_i u_i^T, an m x m symmetric matrix.
DenseMatrix thresholded_projector(const DenseMatrix& a, double lambda);

// ||Pi_{A,lambda} b||
double projected_rhs_norm(const Spectrum& s, const std::vector<double>& b, double lambda);

// Lower bound on ||x*||: (||A|| / (||A||^2 + lambda)) ||Pi b|| when
// ||A|| >= sqrt(lambda); exactly ||Pi b|| / (2 sqrt(lambda)) otherwise.
double xstar_lower_bound(const DenseMatrix& a, const std::vector<double>& b, double lambda);
double xstar_lower_bound(const Spectrum& s, const std::vector<double>& b, double lambda);

// Cancellation constant: sum_i ||A_{i,*}||^2 v_i^2 / ||x||^2 with x = A^T v.
double delta_exact(const DenseMatrix& a, const std::vector<double>& v, const std::vector<double>& x);

// Exact bounds package taken from the dense oracle (valid bounds by equality,
// except xstar which uses the thresholded-projector lower bound).
SpectralBounds bounds_from_oracle(const DenseMatrix& a, const Spectrum& s, const std::vector<double>& b,
                                  double lambda);

}  // namespace qireg
