#include "qireg/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace qireg {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a.at(i, i) = 1.0;
    return a;
}

std::vector<std::vector<double>> DenseMatrix::to_rows() const {
    std::vector<std::vector<double>> out(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        out[i].assign(data.begin() + static_cast<std::ptrdiff_t>(i * cols),
                      data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
    }
    return out;
}

std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
    if (x.size() != a.cols) throw std::invalid_argument("matvec dimension mismatch");
    std::vector<double> y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        const double* row = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> tmatvec(const DenseMatrix& a, const std::vector<double>& x) {
    if (x.size() != a.rows) throw std::invalid_argument("tmatvec dimension mismatch");
    std::vector<double> y(a.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* row = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < a.cols; ++j) y[j] += row[j] * xi;
    }
    return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_sq(const std::vector<double>& a) { return dot(a, a); }

double norm(const std::vector<double>& a) { return std::sqrt(norm_sq(a)); }

std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double fro_norm_sq(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return s;
}

}  // namespace qireg
