#pragma once

#include <cstddef>
#include <vector>

namespace qireg {

/// Row-major dense matrix used by the reference (oracle) computations.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t m, std::size_t n) : rows(m), cols(n), data(m * n, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static DenseMatrix identity(std::size_t n);

    std::vector<std::vector<double>> to_rows() const;
};

// y = A x
std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x);
// y = A^T x
std::vector<double> tmatvec(const DenseMatrix& a, const std::vector<double>& x);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm(const std::vector<double>& a);
double norm_sq(const std::vector<double>& a);
// a - b
std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);

double fro_norm_sq(const DenseMatrix& a);

}  // namespace qireg
