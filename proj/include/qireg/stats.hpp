#pragma once

#include <cstddef>
#include <vector>

namespace qireg {

// Regularized upper incomplete gamma Q(a, x); series/continued-fraction split.
double gamma_q(double a, double x);

// Upper tail P[X >= stat] of a chi-square variable with dof degrees of freedom.
double chi_square_tail(double stat, std::size_t dof);

// Pearson statistic of observed counts against expected probabilities.
// Zero-probability cells must carry zero counts.
double chi_square_stat(const std::vector<std::size_t>& counts, const std::vector<double>& probs);

// Total variation distance between empirical counts and a distribution.
double tv_distance(const std::vector<std::size_t>& counts, const std::vector<double>& probs);

struct MeanStddev {
    double mean = 0.0;
    double stddev = 0.0;        // sample standard deviation
    double standard_error = 0.0;
};
MeanStddev mean_stddev(const std::vector<double>& xs);

}  // namespace qireg
