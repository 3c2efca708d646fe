#include "qireg/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qireg {

namespace {

constexpr double kJacobiTol = 1e-14;
constexpr int kMaxSweeps = 60;

}  // namespace

Spectrum svd(const DenseMatrix& a) {
    if (a.rows == 0 || a.cols == 0) {
        throw std::invalid_argument("svd of empty matrix");
    }
    if (a.rows > kOracleDimCap || a.cols > kOracleDimCap) {
        throw std::invalid_argument("dense oracle limited to dimensions <= 2048");
    }
    for (double x : a.data) {
        if (!std::isfinite(x)) throw std::invalid_argument("svd input has non-finite entries");
    }

    const std::size_t m = a.rows;
    const std::size_t n = a.cols;

    // Column-major working copy; rotations orthogonalize column pairs in place.
    std::vector<std::vector<double>> w(n, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) w[j][i] = a.at(i, j);
    }
    std::vector<double> colsq(n);
    double frosq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        colsq[j] = std::inner_product(w[j].begin(), w[j].end(), w[j].begin(), 0.0);
        frosq += colsq[j];
    }
    // Columns this small after rotations are rotation debris of numerically
    // zero singular directions; churning them prevents convergence.
    const double dead_colsq = frosq * 1e-26;
    // Cached norms of draining columns suffer cancellation; refresh exactly
    // once they are small enough for the dead test to matter.
    const double refresh_colsq = frosq * 1e-20;
    const auto exact_colsq = [&](std::size_t j) {
        return std::inner_product(w[j].begin(), w[j].end(), w[j].begin(), 0.0);
    };

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            if (colsq[p] <= dead_colsq) continue;
            for (std::size_t q = p + 1; q < n; ++q) {
                if (colsq[q] <= dead_colsq) continue;
                double gamma = 0.0;
                const double* wp = w[p].data();
                const double* wq = w[q].data();
                for (std::size_t i = 0; i < m; ++i) gamma += wp[i] * wq[i];
                if (std::abs(gamma) <= kJacobiTol * std::sqrt(colsq[p] * colsq[q])) continue;

                const double zeta = (colsq[q] - colsq[p]) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                double* mp = w[p].data();
                double* mq = w[q].data();
                for (std::size_t i = 0; i < m; ++i) {
                    const double vp = mp[i];
                    const double vq = mq[i];
                    mp[i] = c * vp - s * vq;
                    mq[i] = s * vp + c * vq;
                }
                colsq[p] = colsq[p] - t * gamma;
                colsq[q] = colsq[q] + t * gamma;
                if (colsq[p] <= refresh_colsq) colsq[p] = exact_colsq(p);
                if (colsq[q] <= refresh_colsq) colsq[q] = exact_colsq(q);
                rotated = true;
            }
        }
        if (!rotated) break;
    }

    // Refresh cached norms; incremental updates drift over many sweeps.
    for (std::size_t j = 0; j < n; ++j) {
        colsq[j] = std::inner_product(w[j].begin(), w[j].end(), w[j].begin(), 0.0);
    }

    // Column norms are the singular values; order descending.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        sig[j] = colsq[j] <= dead_colsq ? 0.0 : std::sqrt(colsq[j]);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    Spectrum out;
    out.m = m;
    out.n = n;
    const std::size_t p = std::min(m, n);
    out.sigma.assign(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) out.sigma[k] = sig[order[k]];

    const double smax = out.sigma.empty() ? 0.0 : out.sigma[0];
    std::size_t rank = 0;
    while (rank < p && out.sigma[rank] > kRankTol * smax && out.sigma[rank] > 0.0) ++rank;
    out.rank = rank;

    out.u = DenseMatrix(m, rank);
    out.v = DenseMatrix(n, rank);
    for (std::size_t k = 0; k < rank; ++k) {
        const std::size_t j = order[k];
        const double inv = 1.0 / out.sigma[k];
        for (std::size_t i = 0; i < m; ++i) out.u.at(i, k) = w[j][i] * inv;
    }
    // Right vectors recovered as A^T u_k / sigma_k; exact for the kept part.
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.data.data() + i * n;
        for (std::size_t k = 0; k < rank; ++k) {
            const double ui = out.u.at(i, k);
            if (ui == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out.v.at(j, k) += row[j] * ui;
        }
    }
    for (std::size_t k = 0; k < rank; ++k) {
        const double inv = 1.0 / out.sigma[k];
        for (std::size_t j = 0; j < n; ++j) out.v.at(j, k) *= inv;
    }
    return out;
}

double reconstruction_error(const Spectrum& s, const DenseMatrix& a) {
    double err = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) {
            double r = a.at(i, j);
            for (std::size_t k = 0; k < s.rank; ++k) {
                r -= s.u.at(i, k) * s.sigma[k] * s.v.at(j, k);
            }
            err += r * r;
        }
    }
    return std::sqrt(err);
}

}  // namespace qireg
