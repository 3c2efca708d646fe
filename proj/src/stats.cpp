#include "qireg/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace qireg {

namespace {

// lower regularized gamma by power series, for x < a + 1
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// upper regularized gamma by Lentz continued fraction, for x >= a + 1
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q domain error");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_tail(double stat, std::size_t dof) {
    if (dof == 0) throw std::invalid_argument("chi-square needs at least one degree of freedom");
    if (stat <= 0.0) return 1.0;
    return gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

double chi_square_stat(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size()) throw std::invalid_argument("count/probability size mismatch");
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) throw std::invalid_argument("no observations");
    double stat = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double expected = probs[k] * static_cast<double>(total);
        if (expected <= 0.0) {
            if (counts[k] != 0) throw std::invalid_argument("observation in zero-probability cell");
            continue;
        }
        const double diff = static_cast<double>(counts[k]) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

double tv_distance(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size()) throw std::invalid_argument("count/probability size mismatch");
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) throw std::invalid_argument("no observations");
    double tv = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        tv += std::abs(static_cast<double>(counts[k]) / static_cast<double>(total) - probs[k]);
    }
    return tv / 2.0;
}

MeanStddev mean_stddev(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("no samples");
    MeanStddev out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - out.mean) * (x - out.mean);
        out.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    out.standard_error = out.stddev / std::sqrt(static_cast<double>(xs.size()));
    return out;
}

}  // namespace qireg
