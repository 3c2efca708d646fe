#include "qireg/description.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qireg {

namespace {

QueryLedger scratch_ledger;  // sink for unledgered internal reads

constexpr double kNormRepFactor = 8.0;    // trials per rep: 8 s delta / eps^2
constexpr double kProbeFactor = 64.0;     // trials per doubling probe
constexpr int kMaxDoubling = 64;

}  // namespace

SparseDescription::SparseDescription(const SampledMatrix& a, SparseVector coefficients,
                                     QueryLedger* ledger)
    : a_(&a) {
    coefficients.validate();
    if (coefficients.dim != a.rows()) {
        throw std::invalid_argument("description coefficient dimension must match matrix rows");
    }
    QueryLedger& led = ledger != nullptr ? *ledger : scratch_ledger;
    v_.dim = coefficients.dim;
    weight_prefix_.reserve(coefficients.nnz());
    double acc = 0.0;
    for (std::size_t k = 0; k < coefficients.nnz(); ++k) {
        const std::size_t i = coefficients.indices[k];
        const double vk = coefficients.values[k];
        if (vk == 0.0) continue;
        const double rn = a.row_norm(i, led);
        if (rn == 0.0) continue;  // zero rows never reach x
        v_.indices.push_back(i);
        v_.values.push_back(vk);
        acc += rn * rn * vk * vk;
        weight_prefix_.push_back(acc);
    }
    z_ = acc;
}

double SparseDescription::query(std::size_t j, QueryLedger& ledger) const {
    if (j >= dim()) throw std::out_of_range("description index out of range");
    double x = 0.0;
    for (std::size_t k = 0; k < v_.nnz(); ++k) {
        x += v_.values[k] * a_->entry(v_.indices[k], j, ledger);
    }
    return x;
}

SparseDescription::Proposal SparseDescription::propose(Rng& rng, QueryLedger& ledger) const {
    // proposal row: support index k with probability ||A_{i_k,*}||^2 v_k^2 / Z
    const double u = rng.uniform01() * z_;
    const auto it = std::upper_bound(weight_prefix_.begin(), weight_prefix_.end(), u);
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(it - weight_prefix_.begin()), v_.nnz() - 1);

    const std::size_t j = a_->sample_col(v_.indices[k], rng, ledger);

    // x_j and the proposal denominator from one pass of entry queries
    double xj = 0.0;
    double denom = 0.0;
    for (std::size_t t = 0; t < v_.nnz(); ++t) {
        const double av = a_->entry(v_.indices[t], j, ledger) * v_.values[t];
        xj += av;
        denom += av * av;
    }
    // ratio <= 1 by Cauchy-Schwarz over the s support terms
    const double ratio = xj * xj / (static_cast<double>(v_.nnz()) * denom);
    return {j, ratio};
}

double SparseDescription::cached_delta() const {
    double d = delta_cache_->load(std::memory_order_acquire);
    if (d < 0.0) {
        d = delta(nullptr);  // racing recomputation is benign: same value
        delta_cache_->store(d, std::memory_order_release);
    }
    return d;
}

std::size_t SparseDescription::sample(Rng& rng, QueryLedger& ledger, std::uint64_t max_trials) const {
    if (z_ <= 0.0) throw std::domain_error("cannot sample from an empty description");
    if (max_trials == 0) {
        max_trials = static_cast<std::uint64_t>(
            std::ceil(100.0 * static_cast<double>(support_size()) * std::max(cached_delta(), 1.0)));
    }
    for (std::uint64_t trial = 1; trial <= max_trials; ++trial) {
        const Proposal p = propose(rng, ledger);
        if (rng.uniform01() < p.ratio) return p.index;
    }
    std::ostringstream msg;
    msg << "rejection sampling gave up after " << max_trials
        << " trials (acceptance rate < " << 1.0 / static_cast<double>(max_trials)
        << "); the description has heavy cancellation";
    throw std::runtime_error(msg.str());
}

double SparseDescription::acceptance_rate(std::uint64_t trials, Rng& rng, QueryLedger& ledger) const {
    if (z_ <= 0.0) throw std::domain_error("cannot sample from an empty description");
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    std::uint64_t accepts = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const Proposal p = propose(rng, ledger);
        if (rng.uniform01() < p.ratio) ++accepts;
    }
    return static_cast<double>(accepts) / static_cast<double>(trials);
}

double SparseDescription::estimate_norm(double eps_est, double delta, Rng& rng,
                                        QueryLedger& ledger) const {
    if (z_ <= 0.0) throw std::domain_error("cannot estimate the norm of an empty description");
    if (!(eps_est > 0.0) || eps_est >= 1.0) {
        throw std::invalid_argument("relative accuracy must lie in (0, 1)");
    }
    if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("failure rate must lie in (0, 1)");

    const double s = static_cast<double>(support_size());

    // Adaptive doubling of the cancellation estimate: probe until the
    // acceptance count is consistent with delta_hat >= Delta.
    double delta_hat = 1.0;
    double probe_rate = 0.0;
    bool calibrated = false;
    for (int round = 0; round < kMaxDoubling; ++round) {
        const auto probe_trials =
            static_cast<std::uint64_t>(std::ceil(kProbeFactor * s * delta_hat));
        probe_rate = acceptance_rate(probe_trials, rng, ledger);
        const double accepts = probe_rate * static_cast<double>(probe_trials);
        if (accepts >= kProbeFactor / 4.0) {
            calibrated = true;
            break;
        }
        delta_hat *= 2.0;
    }
    if (!calibrated || probe_rate <= 0.0) {
        throw std::runtime_error("norm estimation failed: acceptance rate is vanishingly small");
    }
    delta_hat = std::max(delta_hat, 2.0 / (probe_rate * s));

    // Repetition + median: each rep is accurate within (1 +- eps)^2 on the
    // rate with constant probability, and the median boosts it to 1 - delta.
    auto reps = static_cast<std::size_t>(std::ceil(4.0 * std::log(1.0 / delta)));
    reps = std::max<std::size_t>(reps, 3) | 1;  // odd
    const auto rep_trials = static_cast<std::uint64_t>(
        std::ceil(kNormRepFactor * s * delta_hat / (eps_est * eps_est)));
    std::vector<double> rates(reps);
    for (auto& r : rates) r = acceptance_rate(rep_trials, rng, ledger);
    std::nth_element(rates.begin(), rates.begin() + static_cast<std::ptrdiff_t>(reps / 2),
                     rates.end());
    const double rate = rates[reps / 2];
    return std::sqrt(rate * s * z_);
}

double SparseDescription::delta(QueryLedger* ledger) const {
    if (z_ <= 0.0) throw std::domain_error("delta undefined for an empty description");
    QueryLedger& led = ledger != nullptr ? *ledger : scratch_ledger;
    double xsq = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) {
        const double xj = query(j, led);
        xsq += xj * xj;
    }
    if (xsq <= 0.0) throw std::domain_error("delta undefined: x = A^T v is zero");
    return z_ / xsq;
}

double SparseDescription::delta_estimated(double eps_est, double delta_fail, Rng& rng,
                                          QueryLedger& ledger) const {
    const double n = estimate_norm(eps_est, delta_fail, rng, ledger);
    if (n <= 0.0) throw std::domain_error("delta undefined: estimated norm is zero");
    return z_ / (n * n);
}

bool SparseDescription::z_consistent(double rel_tol) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < v_.nnz(); ++k) {
        const double rn = a_->row_norms().value(v_.indices[k]);
        acc += rn * rn * v_.values[k] * v_.values[k];
    }
    return std::abs(acc - z_) <= rel_tol * std::max({std::abs(acc), std::abs(z_), 1e-300});
}

}  // namespace qireg
