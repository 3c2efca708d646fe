#include "qireg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace qireg {

void HyperParams::validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("step size must be positive");
    if (iterations == 0 || col_samples == 0 || sketch_size == 0) {
        throw std::invalid_argument("iteration, batch, and sketch counts must be positive");
    }
    if (lambda < 0.0) throw std::invalid_argument("negative regularization parameter");
    if (!(epsilon > 0.0) || epsilon > 1.0) throw std::invalid_argument("epsilon must lie in (0, 1]");
}

HyperParams derive_hyperparams(const SpectralBounds& bounds, double epsilon, double lambda,
                               double b_norm) {
    if (!(epsilon > 0.0) || epsilon > 1.0) throw std::invalid_argument("epsilon must lie in (0, 1]");
    if (lambda < 0.0) throw std::invalid_argument("negative regularization parameter");
    bounds.validate();
    if (lambda > kMaxLambdaFactor * bounds.fro_norm * bounds.op_norm_upper) {
        throw std::invalid_argument("lambda exceeds the allowed multiple of ||A||_F ||A||");
    }

    const double fro_sq = bounds.fro_norm * bounds.fro_norm;
    const double op_sq = bounds.op_norm_upper * bounds.op_norm_upper;
    const double reg = bounds.sigma_lower * bounds.sigma_lower + lambda;

    HyperParams hp;
    hp.lambda = lambda;
    hp.epsilon = epsilon;
    hp.eta = epsilon * epsilon * reg / (32.0 * fro_sq * op_sq + 16.0 * lambda * lambda);
    hp.iterations = static_cast<std::uint64_t>(
        std::ceil(std::log(8.0 / (epsilon * epsilon)) / (hp.eta * reg)));
    hp.col_samples = static_cast<std::size_t>(std::ceil(fro_sq / op_sq));
    hp.sketch_size = choose_s(bounds, b_norm, epsilon, lambda);
    hp.validate();
    return hp;
}

GradientSupport sample_gradient_support(const SampledMatrix& a, std::size_t col_samples, Rng& rng,
                                        QueryLedger& ledger) {
    if (col_samples == 0) throw std::invalid_argument("need at least one column sample");
    GradientSupport g;
    g.row = a.sample_row(rng, ledger);
    g.cols.resize(col_samples);
    for (auto& c : g.cols) c = a.sample_col(g.row, rng, ledger);
    return g;
}

SparseVector SolverState::canonical(std::size_t dim) const {
    SparseVector out;
    out.dim = dim;
    out.indices.reserve(v.size());
    for (const auto& [i, value] : v) {
        if (std::abs(value) >= 1e-300) out.indices.push_back(i);
    }
    std::sort(out.indices.begin(), out.indices.end());
    out.values.reserve(out.indices.size());
    for (std::size_t i : out.indices) out.values.push_back(v.at(i));
    return out;
}

namespace {

// eta * ||A||_F^2 / C * sum_j <A_{*,c_j}, v> / A_{r,c_j}, evaluated on the
// pre-update iterate through entry queries.
double gradient_coefficient(const SolverState& state, const GradientSupport& support,
                            const HyperParams& hp, const SampledMatrix& a, QueryLedger& ledger) {
    const double fro = a.fro_norm(ledger);
    double acc = 0.0;
    for (std::size_t c : support.cols) {
        double inner = 0.0;
        for (const auto& [i, vi] : state.v) {
            inner += a.entry(i, c, ledger) * vi;
        }
        const double pivot = a.entry(support.row, c, ledger);
        if (pivot == 0.0) {
            // sampled columns have probability proportional to the squared entry
            throw std::logic_error("column sampler returned a zero entry");
        }
        acc += inner / pivot;
    }
    return hp.eta * fro * fro / static_cast<double>(support.cols.size()) * acc;
}

void scale_iterate(SolverState& state, double factor) {
    if (factor == 1.0) return;
    for (auto& [i, vi] : state.v) vi *= factor;
}

}  // namespace

void apply_update(SolverState& state, const GradientSupport& support, const SparseVector& b_hat,
                  const HyperParams& hp, const SampledMatrix& a, QueryLedger& ledger) {
    const double step = gradient_coefficient(state, support, hp, a, ledger);
    scale_iterate(state, 1.0 - hp.eta * hp.lambda);
    for (std::size_t k = 0; k < b_hat.nnz(); ++k) {
        state.v[b_hat.indices[k]] += hp.eta * b_hat.values[k];
    }
    state.v[support.row] -= step;
    ++state.t;
}

void apply_update_kaczmarz(SolverState& state, const GradientSupport& support, double b_r,
                           const HyperParams& hp, const SampledMatrix& a, QueryLedger& ledger) {
    const double step = gradient_coefficient(state, support, hp, a, ledger);
    const double row_norm = a.row_norm(support.row, ledger);
    const double fro = a.fro_norm(ledger);
    state.v[support.row] += hp.eta * fro * fro / (row_norm * row_norm) * b_r - step;
    ++state.t;
}

SolveOutcome solve(const SampledMatrix& a, const QueryVector& b, const HyperParams& hp, Rng& rng,
                   SolveMode mode, QueryLedger& ledger, const TraceOptions* trace) {
    hp.validate();
    if (b.size() != a.rows()) throw std::invalid_argument("rhs dimension mismatch");
    if (mode == SolveMode::kaczmarz && hp.lambda != 0.0) {
        throw std::invalid_argument("kaczmarz mode requires lambda = 0");
    }
    const auto start = std::chrono::steady_clock::now();

    SolveOutcome out;
    const LedgerCounts before_sketch = ledger.snapshot();

    SparseVector b_hat;
    b_hat.dim = a.rows();
    if (mode == SolveMode::standard) {
        if (hp.sketch_size >= a.rows()) {
            // The sketch would be denser than the rhs itself; use it directly.
            out.sketch_bypassed = true;
            for (std::size_t i = 0; i < a.rows(); ++i) {
                const double bi = b.query(i, ledger);
                if (bi != 0.0) {
                    b_hat.indices.push_back(i);
                    b_hat.values.push_back(bi);
                }
            }
        } else {
            b_hat = sparsify_b(a, b, hp.sketch_size, rng, ledger);
        }
    }
    out.b_hat_nnz = b_hat.nnz();
    out.sketch_counts = ledger.snapshot() - before_sketch;

    // checkpoint schedule for the optional error trace
    std::vector<std::uint64_t> checkpoints;
    const bool tracing = trace != nullptr && trace->dense_a != nullptr && trace->xstar != nullptr;
    if (tracing) {
        const std::size_t points = std::max<std::size_t>(trace->points, 2);
        for (std::size_t k = 0; k < points; ++k) {
            checkpoints.push_back(static_cast<std::uint64_t>(
                std::llround(static_cast<double>(k) / static_cast<double>(points - 1) *
                             static_cast<double>(hp.iterations))));
        }
        checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    }
    auto record_trace = [&](const SolverState& state, std::uint64_t t) {
        std::vector<double> x(trace->dense_a->cols, 0.0);
        for (const auto& [i, vi] : state.v) {
            const double* row = trace->dense_a->data.data() + i * trace->dense_a->cols;
            for (std::size_t j = 0; j < x.size(); ++j) x[j] += vi * row[j];
        }
        out.error_trace.emplace_back(t, norm_sq(sub(x, *trace->xstar)));
    };

    const LedgerCounts before_solve = ledger.snapshot();
    SolverState state;
    std::size_t next_checkpoint = 0;
    for (std::uint64_t t = 0; t < hp.iterations; ++t) {
        if (tracing && next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
            record_trace(state, t);
            ++next_checkpoint;
        }
        const GradientSupport support = sample_gradient_support(a, hp.col_samples, rng, ledger);
        if (mode == SolveMode::standard) {
            apply_update(state, support, b_hat, hp, a, ledger);
        } else {
            const double b_r = b.query(support.row, ledger);
            apply_update_kaczmarz(state, support, b_r, hp, a, ledger);
        }
        if (state.v.size() > state.t + b_hat.nnz()) out.sparsity_law_ok = false;
    }
    if (tracing && next_checkpoint < checkpoints.size()) record_trace(state, hp.iterations);
    out.solve_counts = ledger.snapshot() - before_solve;

    out.iterations = hp.iterations;
    out.v = state.canonical(a.rows());
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<double> stochastic_gradient_x(const DenseMatrix& a, const std::vector<double>& b,
                                          double lambda, const std::vector<double>& x,
                                          std::size_t col_samples, Rng& rng) {
    if (col_samples == 0) throw std::invalid_argument("need at least one column sample");
    const double fro_sq = fro_norm_sq(a);
    if (fro_sq <= 0.0) throw std::domain_error("cannot sample zero matrix");

    // length-square draws directly from the dense entries (verification path)
    std::vector<double> rowsq(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) rowsq[i] += a.at(i, j) * a.at(i, j);
    }
    auto draw = [&](const std::vector<double>& weights, double total) {
        double u = rng.uniform01() * total;
        std::size_t fallback = weights.size();
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (weights[k] <= 0.0) continue;
            if (u < weights[k]) return k;
            u -= weights[k];
            fallback = k;
        }
        if (fallback == weights.size()) throw std::domain_error("cannot sample zero weights");
        return fallback;
    };
    const std::size_t r = draw(rowsq, fro_sq);
    std::vector<double> colw(a.cols);
    for (std::size_t j = 0; j < a.cols; ++j) colw[j] = a.at(r, j) * a.at(r, j);

    double scale = 0.0;
    for (std::size_t k = 0; k < col_samples; ++k) {
        const std::size_t c = draw(colw, rowsq[r]);
        scale += x[c] / a.at(r, c);
    }
    scale *= fro_sq / static_cast<double>(col_samples);

    std::vector<double> g(a.cols, 0.0);
    for (std::size_t j = 0; j < a.cols; ++j) g[j] = scale * a.at(r, j);
    const std::vector<double> atb = tmatvec(a, b);
    for (std::size_t j = 0; j < a.cols; ++j) g[j] += lambda * x[j] - atb[j];
    return g;
}

GradientMoments enumerate_gradient_moments(const DenseMatrix& a, const std::vector<double>& b,
                                           double lambda, const std::vector<double>& x) {
    const double fro_sq = fro_norm_sq(a);
    if (fro_sq <= 0.0) throw std::domain_error("cannot enumerate over zero matrix");
    const std::vector<double> atb = tmatvec(a, b);

    GradientMoments out;
    out.mean.assign(a.cols, 0.0);
    std::vector<std::vector<double>> realizations;
    std::vector<double> probs;
    realizations.reserve(a.rows * a.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t c = 0; c < a.cols; ++c) {
            const double arc = a.at(r, c);
            if (arc == 0.0) continue;
            const double p = arc * arc / fro_sq;
            std::vector<double> g(a.cols);
            const double scale = fro_sq * x[c] / arc;
            for (std::size_t j = 0; j < a.cols; ++j) {
                g[j] = scale * a.at(r, j) - atb[j] + lambda * x[j];
            }
            for (std::size_t j = 0; j < a.cols; ++j) out.mean[j] += p * g[j];
            realizations.push_back(std::move(g));
            probs.push_back(p);
        }
    }
    for (std::size_t k = 0; k < realizations.size(); ++k) {
        out.variance += probs[k] * norm_sq(sub(realizations[k], out.mean));
    }
    return out;
}

double enumerate_gradient_diff_sq(const DenseMatrix& a, const std::vector<double>& b, double lambda,
                                  const std::vector<double>& x, const std::vector<double>& y) {
    (void)b;  // the rhs cancels in the difference
    const double fro_sq = fro_norm_sq(a);
    if (fro_sq <= 0.0) throw std::domain_error("cannot enumerate over zero matrix");
    double acc = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t c = 0; c < a.cols; ++c) {
            const double arc = a.at(r, c);
            if (arc == 0.0) continue;
            const double p = arc * arc / fro_sq;
            const double scale = fro_sq * (x[c] - y[c]) / arc;
            double sq = 0.0;
            for (std::size_t j = 0; j < a.cols; ++j) {
                const double d = scale * a.at(r, j) + lambda * (x[j] - y[j]);
                sq += d * d;
            }
            acc += p * sq;
        }
    }
    return acc;
}

VSpaceMoments v_space_gradient_moments(const DenseMatrix& a, const std::vector<double>& b,
                                       double lambda, const std::vector<double>& v,
                                       std::size_t col_samples) {
    if (col_samples == 0) throw std::invalid_argument("need at least one column sample");
    const double fro_sq = fro_norm_sq(a);
    if (fro_sq <= 0.0) throw std::domain_error("cannot enumerate over zero matrix");

    const std::vector<double> x = tmatvec(a, v);   // A^T v
    const std::vector<double> ax = matvec(a, x);   // A A^T v

    // Mean accumulated realization by realization: weight p_{rc} times the
    // sampled coefficient F^2 <A_{*,c}, v> / A_{r,c} on e_r.
    VSpaceMoments out;
    out.mean.assign(a.rows, 0.0);
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t c = 0; c < a.cols; ++c) {
            const double arc = a.at(r, c);
            if (arc == 0.0) continue;
            const double p = arc * arc / fro_sq;
            out.mean[r] += p * (fro_sq * x[c] / arc);
        }
    }
    for (std::size_t i = 0; i < a.rows; ++i) out.mean[i] += lambda * v[i] - b[i];

    std::vector<double> rowsq(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) rowsq[i] += a.at(i, j) * a.at(i, j);
    }

    // C = 1 second moment of the sampled term in the D norm:
    //   V1 = sum_{r,c} p_{rc} ||A_{r,*}||^2 (F^2 <A_{*,c}, v> / A_{r,c})^2
    double v1 = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t c = 0; c < a.cols; ++c) {
            const double arc = a.at(r, c);
            if (arc == 0.0) continue;
            const double p = arc * arc / fro_sq;
            const double term = fro_sq * x[c] / arc;
            v1 += p * rowsq[r] * term * term;
        }
    }
    double mean_d_sq = 0.0;  // ||A A^T v||_D^2
    for (std::size_t i = 0; i < a.rows; ++i) mean_d_sq += rowsq[i] * ax[i] * ax[i];
    const double e2 = fro_sq * norm_sq(ax);  // the i.i.d. cross term

    const double c_inv = 1.0 / static_cast<double>(col_samples);
    out.d_variance = c_inv * v1 + (1.0 - c_inv) * e2 - mean_d_sq;
    return out;
}

}  // namespace qireg
