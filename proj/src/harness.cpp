#include "qireg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qireg/description.hpp"
#include "qireg/sketch.hpp"
#include "qireg/stats.hpp"
#include "qireg/svd.hpp"

namespace qireg {

namespace {

using nlohmann::json;

json counts_to_json(const LedgerCounts& c) {
    return json{{"sample", c.sample},   {"sample1", c.sample1}, {"sample2", c.sample2},
                {"query", c.query},     {"norm", c.norm},       {"total", c.total()}};
}

const char* mode_name(SolveMode mode) {
    return mode == SolveMode::standard ? "standard" : "kaczmarz";
}

double timed_seconds(const std::function<void()>& body) {
    const auto start = std::chrono::steady_clock::now();
    body();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::size_t worker_count() {
    if (const char* env = std::getenv("QIREG_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

PreparedInstance prepare_instance(const Instance& inst, double epsilon, double lambda) {
    PreparedInstance prep;
    prep.instance = &inst;
    prep.epsilon = epsilon;
    prep.lambda = lambda;
    prep.spectrum = svd(inst.a);
    prep.bounds = bounds_from_oracle(inst.a, prep.spectrum, inst.b, lambda);
    prep.xstar = solve_exact(prep.spectrum, inst.b, lambda);
    prep.xstar_norm = norm(prep.xstar);

    const double b_norm = norm(inst.b);
    if (b_norm > 0.0 && prep.bounds.xstar_norm_lower <= 0.0) {
        // rhs entirely outside the projector's reach: the sketch-size formula
        // degenerates, so force the dense-rhs path
        SpectralBounds padded = prep.bounds;
        padded.xstar_norm_lower = 1.0;
        prep.hp = derive_hyperparams(padded, epsilon, lambda, b_norm);
        prep.hp.sketch_size = inst.a.rows;
    } else {
        prep.hp = derive_hyperparams(prep.bounds, epsilon, lambda, b_norm);
    }
    return prep;
}

RunReport run_single(const PreparedInstance& prep, std::uint64_t trial_index, std::uint64_t seed,
                     const TrialOptions& opt) {
    const Instance& inst = *prep.instance;
    RunReport report;
    report.trial = trial_index;
    report.seed = seed;
    report.mode = mode_name(opt.mode);
    report.epsilon = prep.epsilon;
    report.lambda = prep.lambda;
    report.eta = prep.hp.eta;
    report.iterations = prep.hp.iterations;
    report.col_samples = prep.hp.col_samples;
    report.sketch_size = prep.hp.sketch_size;

    Rng rng(seed);
    QueryLedger ledger;
    const QueryVector b(inst.b);

    TraceOptions trace;
    const TraceOptions* trace_ptr = nullptr;
    if (opt.trace) {
        trace.dense_a = &inst.a;
        trace.xstar = &prep.xstar;
        trace.points = opt.trace_points;
        trace_ptr = &trace;
    }

    const auto start = std::chrono::steady_clock::now();
    const SolveOutcome outcome = solve(inst.sq, b, prep.hp, rng, opt.mode, ledger, trace_ptr);

    report.output_nnz = outcome.v.nnz();
    report.b_hat_nnz = outcome.b_hat_nnz;
    report.sketch_bypassed = outcome.sketch_bypassed;
    report.sparsity_law_ok = outcome.sparsity_law_ok;
    report.sketch_counts = outcome.sketch_counts;
    report.solve_counts = outcome.solve_counts;
    report.error_trace = outcome.error_trace;

    // output-access phase: materialize the description and draw from it
    const LedgerCounts before_output = ledger.snapshot();
    const SparseDescription desc(inst.sq, outcome.v, &ledger);
    if (desc.z() > 0.0) {
        for (std::size_t k = 0; k < opt.output_samples; ++k) {
            desc.sample(rng, ledger);
        }
    }
    report.output_counts = ledger.snapshot() - before_output;

    // oracle-side instrumentation, outside the query accounting
    std::vector<double> x(inst.a.cols, 0.0);
    {
        const std::vector<double> v_dense = outcome.v.to_dense();
        x = tmatvec(inst.a, v_dense);
        const double err = norm(sub(x, prep.xstar));
        if (prep.xstar_norm > 0.0) {
            report.relative_error = err / prep.xstar_norm;
        } else {
            report.xstar_is_zero = true;
            report.relative_error = norm(x);  // absolute by convention
        }
        const double xsq = norm_sq(x);
        report.delta = xsq > 0.0 ? desc.z() / xsq : 0.0;
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

TrialsResult run_trials(const PreparedInstance& prep, std::uint64_t trials,
                        std::uint64_t master_seed, const TrialOptions& opt) {
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    TrialsResult result;
    result.reports.resize(trials);

    const std::size_t workers =
        std::min<std::size_t>(worker_count(), static_cast<std::size_t>(trials));
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto body = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= trials || failed.load()) break;
            try {
                result.reports[i] = run_single(prep, i, master_seed ^ i, opt);
            } catch (const std::exception& e) {
                std::scoped_lock lock(failure_mutex);
                failed.store(true);
                if (failure.empty()) failure = e.what();
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("trial failed: " + failure);

    TrialsSummary& s = result.summary;
    s.trials = trials;
    s.master_seed = master_seed;
    s.mode = mode_name(opt.mode);
    s.epsilon = prep.epsilon;
    s.lambda = prep.lambda;
    s.eps_sq_xstar_sq = prep.epsilon * prep.epsilon * prep.xstar_norm * prep.xstar_norm;
    std::uint64_t successes = 0;
    for (const RunReport& r : result.reports) {
        const double abs_err =
            r.xstar_is_zero ? r.relative_error : r.relative_error * prep.xstar_norm;
        s.mean_sq_error += abs_err * abs_err;
        s.mean_delta += r.delta;
        s.mean_output_nnz += static_cast<double>(r.output_nnz);
        s.mean_total_queries += static_cast<double>(
            (r.sketch_counts + r.solve_counts + r.output_counts).total());
        successes += r.relative_error <= prep.epsilon ? 1 : 0;
        s.all_sparsity_ok = s.all_sparsity_ok && r.sparsity_law_ok;
    }
    const auto dn = static_cast<double>(trials);
    s.mean_sq_error /= dn;
    s.mean_delta /= dn;
    s.mean_output_nnz /= dn;
    s.mean_total_queries /= dn;
    s.success_fraction = static_cast<double>(successes) / dn;
    return result;
}

std::string report_to_json(const RunReport& r) {
    json j{{"type", "trial"},
           {"trial", r.trial},
           {"seed", r.seed},
           {"mode", r.mode},
           {"epsilon", r.epsilon},
           {"lambda", r.lambda},
           {"eta", r.eta},
           {"iterations", r.iterations},
           {"col_samples", r.col_samples},
           {"sketch_size", r.sketch_size},
           {"relative_error", r.relative_error},
           {"xstar_is_zero", r.xstar_is_zero},
           {"delta", r.delta},
           {"output_nnz", r.output_nnz},
           {"b_hat_nnz", r.b_hat_nnz},
           {"sketch_bypassed", r.sketch_bypassed},
           {"sparsity_law_ok", r.sparsity_law_ok},
           {"queries",
            json{{"sketch", counts_to_json(r.sketch_counts)},
                 {"solve", counts_to_json(r.solve_counts)},
                 {"output", counts_to_json(r.output_counts)},
                 {"total", counts_to_json(r.sketch_counts + r.solve_counts + r.output_counts)}}}};
    if (!r.error_trace.empty()) {
        json trace = json::array();
        for (const auto& [t, e] : r.error_trace) trace.push_back(json::array({t, e}));
        j["error_trace"] = std::move(trace);
    }
    return j.dump();
}

std::string summary_to_json(const TrialsSummary& s) {
    const json j{{"type", "summary"},
                 {"trials", s.trials},
                 {"master_seed", s.master_seed},
                 {"mode", s.mode},
                 {"epsilon", s.epsilon},
                 {"lambda", s.lambda},
                 {"success_fraction", s.success_fraction},
                 {"mean_sq_error", s.mean_sq_error},
                 {"eps_sq_xstar_sq", s.eps_sq_xstar_sq},
                 {"mean_delta", s.mean_delta},
                 {"mean_output_nnz", s.mean_output_nnz},
                 {"mean_total_queries", s.mean_total_queries},
                 {"all_sparsity_ok", s.all_sparsity_ok}};
    return j.dump();
}

void write_reports_jsonl(std::ostream& out, const TrialsResult& result) {
    for (const RunReport& r : result.reports) out << report_to_json(r) << '\n';
    out << summary_to_json(result.summary) << '\n';
}

std::vector<ScaleRow> scaling_experiment(const InstanceSpec& base_spec,
                                         const std::vector<std::size_t>& dims, double epsilon,
                                         double lambda, std::uint64_t master_seed) {
    const Instance base = generate_instance(base_spec);
    const PreparedInstance base_prep = prepare_instance(base, epsilon, lambda);

    std::vector<ScaleRow> rows;
    rows.reserve(dims.size());
    for (const std::size_t ambient : dims) {
        const Instance embedded = embed_instance(base, ambient, master_seed);

        ScaleRow row;
        row.ambient = ambient;
        row.eta = base_prep.hp.eta;
        row.iterations = base_prep.hp.iterations;
        row.col_samples = base_prep.hp.col_samples;
        row.sketch_size = base_prep.hp.sketch_size;

        // dense-oracle cost at this ambient dimension
        Spectrum spec_embedded;
        std::vector<double> xstar_embedded;
        row.oracle_seconds = timed_seconds([&] {
            spec_embedded = svd(embedded.a);
            xstar_embedded = solve_exact(spec_embedded, embedded.b, lambda);
        });
        double dev = 0.0;
        for (std::size_t k = 0; k < spec_embedded.sigma.size(); ++k) {
            const double ref =
                k < base_prep.spectrum.sigma.size() ? base_prep.spectrum.sigma[k] : 0.0;
            dev = std::max(dev, std::abs(spec_embedded.sigma[k] - ref));
        }
        row.spectrum_deviation = dev;

        // the randomized path reuses the base hyperparameters and seed
        Rng rng(master_seed);
        QueryLedger ledger;
        const QueryVector b(embedded.b);
        SolveOutcome outcome;
        row.sgd_seconds = timed_seconds(
            [&] { outcome = solve(embedded.sq, b, base_prep.hp, rng, SolveMode::standard, ledger); });
        row.solve_counts = outcome.solve_counts;

        const std::vector<double> x = tmatvec(embedded.a, outcome.v.to_dense());
        const double xn = norm(xstar_embedded);
        row.relative_error = xn > 0.0 ? norm(sub(x, xstar_embedded)) / xn : norm(x);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string scale_row_to_json(const ScaleRow& row) {
    const json j{{"type", "scale"},
                 {"ambient", row.ambient},
                 {"eta", row.eta},
                 {"iterations", row.iterations},
                 {"col_samples", row.col_samples},
                 {"sketch_size", row.sketch_size},
                 {"solve_queries", counts_to_json(row.solve_counts)},
                 {"sgd_seconds", row.sgd_seconds},
                 {"oracle_seconds", row.oracle_seconds},
                 {"spectrum_deviation", row.spectrum_deviation},
                 {"relative_error", row.relative_error}};
    return j.dump();
}

// ---------------------------------------------------------------------------
// verification drivers

namespace {

DenseMatrix random_dense(std::size_t m, std::size_t n, Rng& rng) {
    DenseMatrix a(m, n);
    for (auto& x : a.data) x = rng.gaussian();
    return a;
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.gaussian();
    return v;
}

double rel_diff(double got, double want) {
    const double scale = std::max({std::abs(got), std::abs(want), 1e-30});
    return std::abs(got - want) / scale;
}

double rel_diff_vec(const std::vector<double>& got, const std::vector<double>& want) {
    const double scale = std::max({norm(got), norm(want), 1e-30});
    return norm(sub(got, want)) / scale;
}

std::string format_stat(const char* label, double value, double limit) {
    std::ostringstream ss;
    ss.precision(6);
    ss << label << " = " << value << " (limit " << limit << ")";
    return ss.str();
}

}  // namespace

std::vector<CheckResult> gradient_moment_checks(const MomentCheckParams& params) {
    Rng rng(params.seed);
    double worst_mean = 0.0;
    double worst_var = 0.0;
    double worst_diff = 0.0;
    for (std::size_t trial = 0; trial < params.instances; ++trial) {
        const std::size_t m = 2 + rng.below(params.max_dim - 1);
        const std::size_t n = 2 + rng.below(params.max_dim - 1);
        const DenseMatrix a = random_dense(m, n, rng);
        const std::vector<double> b = random_vec(m, rng);
        const std::vector<double> x = random_vec(n, rng);
        const std::vector<double> y = random_vec(n, rng);
        const double lambda = trial % 2 == 0 ? 0.0 : rng.uniform(0.0, 2.0);

        const GradientMoments moments = enumerate_gradient_moments(a, b, lambda, x);
        worst_mean = std::max(worst_mean, rel_diff_vec(moments.mean, grad_exact(a, b, lambda, x)));

        const double fro_sq = fro_norm_sq(a);
        const std::vector<double> ax = matvec(a, x);
        const double var_expected = fro_sq * fro_sq * norm_sq(x) - norm_sq(tmatvec(a, ax));
        worst_var = std::max(worst_var, rel_diff(moments.variance, var_expected));

        // difference identity: E||g(x) - g(y)||^2 = ||(A^T A + lambda)(x-y)||^2 + Var[g(x-y)]
        const std::vector<double> d = sub(x, y);
        std::vector<double> reg_d = tmatvec(a, matvec(a, d));
        axpy(lambda, d, reg_d);
        const std::vector<double> ad = matvec(a, d);
        const double var_d = fro_sq * fro_sq * norm_sq(d) - norm_sq(tmatvec(a, ad));
        const double expected = norm_sq(reg_d) + var_d;
        worst_diff =
            std::max(worst_diff, rel_diff(enumerate_gradient_diff_sq(a, b, lambda, x, y), expected));
    }
    return {
        {"gradient-mean-unbiased", worst_mean <= params.tol,
         format_stat("max rel dev", worst_mean, params.tol)},
        {"gradient-variance-identity", worst_var <= params.tol,
         format_stat("max rel dev", worst_var, params.tol)},
        {"gradient-difference-identity", worst_diff <= params.tol,
         format_stat("max rel dev", worst_diff, params.tol)},
    };
}

std::vector<CheckResult> vspace_moment_checks(const MomentCheckParams& params) {
    Rng rng(params.seed ^ 0x9e3779b97f4a7c15ull);
    double worst_mean = 0.0;
    bool bound_ok = true;
    double worst_bound_ratio = 0.0;
    for (std::size_t trial = 0; trial < params.instances; ++trial) {
        const std::size_t m = 2 + rng.below(params.max_dim - 1);
        const std::size_t n = 2 + rng.below(params.max_dim - 1);
        const DenseMatrix a = random_dense(m, n, rng);
        const std::vector<double> b = random_vec(m, rng);
        const std::vector<double> v = random_vec(m, rng);
        const double lambda = trial % 2 == 0 ? 0.0 : rng.uniform(0.0, 2.0);

        const VSpaceMoments at_c1 = v_space_gradient_moments(a, b, lambda, v, 1);
        std::vector<double> expected_mean = matvec(a, tmatvec(a, v));
        for (std::size_t i = 0; i < m; ++i) expected_mean[i] += lambda * v[i] - b[i];
        worst_mean = std::max(worst_mean, rel_diff_vec(at_c1.mean, expected_mean));

        const double fro_sq = fro_norm_sq(a);
        const double op = svd(a).sigma_max();
        const auto batch = static_cast<std::size_t>(std::ceil(fro_sq / (op * op)));
        const VSpaceMoments at_c = v_space_gradient_moments(a, b, lambda, v, batch);
        const double limit = 2.0 * fro_sq * op * op * norm_sq(tmatvec(a, v));
        if (at_c.d_variance > limit * (1.0 + 1e-12)) bound_ok = false;
        if (limit > 0.0) worst_bound_ratio = std::max(worst_bound_ratio, at_c.d_variance / limit);
    }
    // degenerate case: zero coefficients and rhs
    const DenseMatrix a2 = random_dense(3, 3, rng);
    const VSpaceMoments zero =
        v_space_gradient_moments(a2, std::vector<double>(3, 0.0), 0.5, std::vector<double>(3, 0.0), 1);
    const bool zero_ok = norm(zero.mean) == 0.0 && zero.d_variance == 0.0;
    return {
        {"vspace-mean-unbiased", worst_mean <= params.tol,
         format_stat("max rel dev", worst_mean, params.tol)},
        {"vspace-dvariance-bound", bound_ok && zero_ok,
         format_stat("max variance/limit", worst_bound_ratio, 1.0)},
    };
}

std::vector<CheckResult> distribution_checks(const DistributionCheckParams& params) {
    Rng rng(params.seed);
    QueryLedger ledger;
    std::vector<CheckResult> results;

    const auto run_chi_square = [&](const char* name, const std::vector<double>& probs,
                                    const std::function<std::size_t()>& draw) {
        std::vector<std::size_t> counts(probs.size(), 0);
        for (std::size_t k = 0; k < params.draws; ++k) ++counts[draw()];
        std::size_t dof = 0;
        for (double p : probs) dof += p > 0.0 ? 1 : 0;
        const double stat = chi_square_stat(counts, probs);
        const double tail = chi_square_tail(stat, dof - 1);
        const double tv = tv_distance(counts, probs);
        const bool ok = tail >= params.significance && tv < params.tv_limit;
        std::ostringstream detail;
        detail.precision(5);
        detail << "chi2 = " << stat << ", p = " << tail << ", tv = " << tv;
        results.push_back({name, ok, detail.str()});
    };

    // vector sampler, 16 mixed-sign entries
    std::vector<double> values(16);
    for (auto& x : values) x = rng.gaussian();
    values[5] = 0.0;  // zero-probability cell stays empty
    const SampledVector sv(values);
    std::vector<double> vec_probs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) vec_probs[i] = values[i] * values[i] / sv.sqnorm();
    run_chi_square("vector-sample-law", vec_probs, [&] { return sv.sample(rng, ledger); });

    // uniform four-point law (3 degrees of freedom)
    const SampledVector uniform(std::vector<double>{1.0, 1.0, 1.0, 1.0});
    run_chi_square("vector-sample-uniform", std::vector<double>(4, 0.25),
                   [&] { return uniform.sample(rng, ledger); });

    // matrix samplers over a random 8 x 6
    const DenseMatrix a = random_dense(8, 6, rng);
    const SampledMatrix sq(a.to_rows());
    std::vector<double> row_probs(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) row_probs[i] = sq.row_sqnorm(i) / sq.fro_sq();
    run_chi_square("matrix-row-sample-law", row_probs, [&] { return sq.sample_row(rng, ledger); });

    std::vector<double> col_probs(a.cols);
    for (std::size_t j = 0; j < a.cols; ++j) {
        col_probs[j] = a.at(2, j) * a.at(2, j) / sq.row_sqnorm(2);
    }
    run_chi_square("matrix-col-sample-law", col_probs,
                   [&] { return sq.sample_col(2, rng, ledger); });

    // joint (row, column) law matches the length-square distribution over entries
    const DenseMatrix a3 = random_dense(3, 3, rng);
    const SampledMatrix sq3(a3.to_rows());
    std::vector<double> joint_probs(9);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            joint_probs[i * 3 + j] = a3.at(i, j) * a3.at(i, j) / sq3.fro_sq();
        }
    }
    run_chi_square("joint-support-law", joint_probs, [&] {
        const GradientSupport g = sample_gradient_support(sq3, 1, rng, ledger);
        return g.row * 3 + g.cols[0];
    });

    return results;
}

std::vector<CheckResult> sketch_checks(const SketchCheckParams& params) {
    InstanceSpec spec;
    spec.m = params.m;
    spec.n = params.n;
    spec.rank = params.rank;
    spec.law = SingularLaw::log_uniform;
    spec.sigma_min = 1.0;
    spec.sigma_max = 2.0;
    spec.rhs = RhsMode::random;
    spec.seed = params.seed;
    const Instance inst = generate_instance(spec);

    Rng rng(params.seed ^ 0xabcdef12345ull);
    QueryLedger ledger;
    const QueryVector b(inst.b);
    const std::vector<double> atb = tmatvec(inst.a, inst.b);
    const double fro_sq = fro_norm_sq(inst.a);
    const double b_sq = norm_sq(inst.b);
    const double limit = fro_sq * b_sq / static_cast<double>(params.s);

    std::vector<double> rowsq(params.m, 0.0);
    for (std::size_t i = 0; i < params.m; ++i) {
        for (std::size_t j = 0; j < params.n; ++j) rowsq[i] += inst.a.at(i, j) * inst.a.at(i, j);
    }

    double mean_a_err = 0.0;
    double mean_d_err = 0.0;
    std::vector<double> coord_sum(params.m, 0.0);
    std::vector<double> coord_sq_sum(params.m, 0.0);
    for (std::size_t rep = 0; rep < params.sketches; ++rep) {
        const SparseVector b_hat = sparsify_b(inst.sq, b, params.s, rng, ledger);
        // same sketch drives both error functionals
        std::vector<double> diff(inst.b.size(), 0.0);
        for (std::size_t k = 0; k < b_hat.nnz(); ++k) diff[b_hat.indices[k]] = b_hat.values[k];
        double d_err = 0.0;
        for (std::size_t i = 0; i < params.m; ++i) {
            const double di = diff[i] - inst.b[i];
            d_err += rowsq[i] * di * di;
            coord_sum[i] += diff[i];
            coord_sq_sum[i] += diff[i] * diff[i];
        }
        mean_d_err += d_err;
        mean_a_err += norm_sq(sub(tmatvec(inst.a, diff), atb));
    }
    mean_a_err /= static_cast<double>(params.sketches);
    mean_d_err /= static_cast<double>(params.sketches);

    // per-coordinate unbiasedness within 5 standard errors
    bool unbiased = true;
    double worst_sigmas = 0.0;
    for (std::size_t i = 0; i < params.m; ++i) {
        const auto reps = static_cast<double>(params.sketches);
        const double mean = coord_sum[i] / reps;
        const double var = std::max(coord_sq_sum[i] / reps - mean * mean, 0.0);
        const double se = std::sqrt(var / reps);
        const double sigmas = se > 0.0 ? std::abs(mean - inst.b[i]) / se
                                       : (std::abs(mean - inst.b[i]) > 1e-12 ? 1e9 : 0.0);
        worst_sigmas = std::max(worst_sigmas, sigmas);
        if (sigmas > 5.0) unbiased = false;
    }

    return {
        {"sketch-matrix-product-error", mean_a_err <= params.slack * limit,
         format_stat("mean ||A^T (b_hat - b)||^2", mean_a_err, params.slack * limit)},
        {"sketch-dnorm-error", mean_d_err <= params.slack * limit,
         format_stat("mean ||D (b_hat - b)||^2", mean_d_err, params.slack * limit)},
        {"sketch-unbiased", unbiased, format_stat("worst deviation sigmas", worst_sigmas, 5.0)},
    };
}

}  // namespace qireg
