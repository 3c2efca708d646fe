#include "qireg/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace qireg {

void SpectralBounds::validate() const {
    if (!(op_norm_upper > 0.0) || !(sigma_lower > 0.0) || !(fro_norm > 0.0)) {
        throw std::invalid_argument("spectral bounds must be positive");
    }
    if (op_norm_upper < sigma_lower) {
        throw std::invalid_argument("operator-norm upper bound below sigma lower bound");
    }
    if (xstar_norm_lower < 0.0) {
        throw std::invalid_argument("negative xstar lower bound");
    }
}

std::vector<double> solve_exact(const Spectrum& s, const std::vector<double>& b, double lambda) {
    if (b.size() != s.m) throw std::invalid_argument("solve_exact rhs dimension mismatch");
    if (lambda < 0.0) throw std::invalid_argument("negative regularization parameter");
    std::vector<double> x(s.n, 0.0);
    for (std::size_t k = 0; k < s.rank; ++k) {
        double ub = 0.0;
        for (std::size_t i = 0; i < s.m; ++i) ub += s.u.at(i, k) * b[i];
        const double coeff = s.sigma[k] / (s.sigma[k] * s.sigma[k] + lambda) * ub;
        for (std::size_t j = 0; j < s.n; ++j) x[j] += coeff * s.v.at(j, k);
    }
    return x;
}

std::vector<double> solve_exact(const DenseMatrix& a, const std::vector<double>& b, double lambda) {
    return solve_exact(svd(a), b, lambda);
}

std::vector<double> grad_exact(const DenseMatrix& a, const std::vector<double>& b, double lambda,
                               const std::vector<double>& x) {
    if (b.size() != a.rows || x.size() != a.cols) {
        throw std::invalid_argument("grad_exact dimension mismatch");
    }
    const std::vector<double> residual = sub(matvec(a, x), b);
    std::vector<double> g = tmatvec(a, residual);
    axpy(lambda, x, g);
    return g;
}

double f_value(const DenseMatrix& a, const std::vector<double>& b, double lambda,
               const std::vector<double>& x) {
    if (b.size() != a.rows || x.size() != a.cols) {
        throw std::invalid_argument("f_value dimension mismatch");
    }
    return 0.5 * (norm_sq(sub(matvec(a, x), b)) + lambda * norm_sq(x));
}

double projector_weight(double sigma, double lambda) {
    if (sigma <= 0.0) return 0.0;
    if (lambda <= 0.0) return 1.0;
    const double rt = std::sqrt(lambda);
    if (sigma > rt) return 1.0;
    return 2.0 * sigma * rt / (sigma * sigma + lambda);
}

DenseMatrix thresholded_projector(const DenseMatrix& a, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("negative regularization parameter");
    const Spectrum s = svd(a);
    DenseMatrix pi(s.m, s.m);
    for (std::size_t k = 0; k < s.rank; ++k) {
        const double p = projector_weight(s.sigma[k], lambda);
        for (std::size_t i = 0; i < s.m; ++i) {
            const double ui = s.u.at(i, k) * p;
            if (ui == 0.0) continue;
            for (std::size_t j = 0; j < s.m; ++j) pi.at(i, j) += ui * s.u.at(j, k);
        }
    }
    return pi;
}

double projected_rhs_norm(const Spectrum& s, const std::vector<double>& b, double lambda) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s.rank; ++k) {
        double ub = 0.0;
        for (std::size_t i = 0; i < s.m; ++i) ub += s.u.at(i, k) * b[i];
        const double p = projector_weight(s.sigma[k], lambda);
        acc += p * p * ub * ub;
    }
    return std::sqrt(acc);
}

double xstar_lower_bound(const Spectrum& s, const std::vector<double>& b, double lambda) {
    if (s.rank == 0) throw std::domain_error("xstar lower bound undefined for zero matrix");
    const double op = s.sigma_max();
    const double pib = projected_rhs_norm(s, b, lambda);
    if (op * op >= lambda) {
        return op / (op * op + lambda) * pib;
    }
    return pib / (2.0 * std::sqrt(lambda));
}

double xstar_lower_bound(const DenseMatrix& a, const std::vector<double>& b, double lambda) {
    return xstar_lower_bound(svd(a), b, lambda);
}

double delta_exact(const DenseMatrix& a, const std::vector<double>& v, const std::vector<double>& x) {
    if (v.size() != a.rows || x.size() != a.cols) {
        throw std::invalid_argument("delta_exact dimension mismatch");
    }
    const double xsq = norm_sq(x);
    if (xsq <= 0.0) throw std::domain_error("delta undefined for zero x");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (v[i] == 0.0) continue;
        double rowsq = 0.0;
        const double* row = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < a.cols; ++j) rowsq += row[j] * row[j];
        acc += rowsq * v[i] * v[i];
    }
    return acc / xsq;
}

SpectralBounds bounds_from_oracle(const DenseMatrix& a, const Spectrum& s, const std::vector<double>& b,
                                  double lambda) {
    SpectralBounds out;
    out.op_norm_upper = s.sigma_max();
    out.sigma_lower = s.sigma_min_nonzero();
    out.fro_norm = std::sqrt(fro_norm_sq(a));
    const double bnorm = norm(b);
    out.xstar_norm_lower = bnorm > 0.0 ? xstar_lower_bound(s, b, lambda) : 0.0;
    return out;
}

}  // namespace qireg
