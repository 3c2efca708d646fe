// Acceptance suite: runs every guarantee the library promises end to end and
// prints one pass/fail line per criterion. Exit code 0 only if all pass.
// Optional arguments select a subset by number (1-11).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qireg/description.hpp"
#include "qireg/harness.hpp"
#include "qireg/oracle.hpp"
#include "qireg/stats.hpp"
#include "qireg/svd.hpp"

using namespace qireg;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

InstanceSpec endtoend_instance_spec() {
    InstanceSpec spec;
    spec.m = 50;
    spec.n = 40;
    spec.rank = 5;
    spec.law = SingularLaw::log_uniform;
    spec.sigma_min = 1.0;
    spec.sigma_max = 2.0;
    spec.rhs = RhsMode::planted;
    spec.noise_frac = 0.1;
    spec.seed = 20240917;
    return spec;
}

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return std::string(buf);
}

Outcome from_checks(const std::vector<CheckResult>& checks) {
    Outcome out;
    out.ok = true;
    std::ostringstream detail;
    for (const auto& c : checks) {
        out.ok = out.ok && c.ok;
        if (!c.ok) detail << c.name << " FAILED: " << c.detail << "; ";
    }
    if (out.ok) detail << checks.size() << " checks passed";
    out.detail = detail.str();
    return out;
}

// criteria 5 and 6 share their run results with criterion 7
struct EndToEndRuns {
    std::optional<TrialsResult> plain;
    std::optional<TrialsResult> ridge;
};
EndToEndRuns endtoend_runs;

Outcome criterion_gradient_moments() {
    MomentCheckParams params;
    params.instances = 100;
    params.max_dim = 8;
    params.tol = 1e-10;
    return from_checks(gradient_moment_checks(params));
}

Outcome criterion_vspace_moments() {
    MomentCheckParams params;
    params.instances = 100;
    params.max_dim = 8;
    params.tol = 1e-10;
    return from_checks(vspace_moment_checks(params));
}

Outcome criterion_distributions() {
    DistributionCheckParams params;
    params.draws = 100000;
    params.significance = 1e-3;
    params.tv_limit = 0.02;
    return from_checks(distribution_checks(params));
}

Outcome criterion_sketch() {
    SketchCheckParams params;
    params.sketches = 10000;
    params.m = 30;
    params.n = 20;
    params.s = 200;
    params.slack = 1.1;
    return from_checks(sketch_checks(params));
}

Outcome run_endtoend_trials(double lambda_scale, std::optional<TrialsResult>& slot,
                           SolveMode mode, double noise) {
    InstanceSpec spec = endtoend_instance_spec();
    spec.noise_frac = noise;
    const Instance inst = generate_instance(spec);
    const Spectrum spectrum = svd(inst.a);
    const double sigma_min = spectrum.sigma_min_nonzero();
    const double lambda = lambda_scale * sigma_min * sigma_min;

    const PreparedInstance prep = prepare_instance(inst, 0.3, lambda);
    if (lambda > 0.0) {
        // hyperparameters must follow the regularized formulas
        const double fro_sq = prep.bounds.fro_norm * prep.bounds.fro_norm;
        const double op_sq = prep.bounds.op_norm_upper * prep.bounds.op_norm_upper;
        const double reg = prep.bounds.sigma_lower * prep.bounds.sigma_lower + lambda;
        const double eta_expected =
            0.3 * 0.3 * reg / (32.0 * fro_sq * op_sq + 16.0 * lambda * lambda);
        if (std::abs(prep.hp.eta - eta_expected) > 1e-15 * eta_expected) {
            return {false, "regularized step size does not follow the formula"};
        }
    }
    TrialOptions opt;
    opt.mode = mode;
    slot = run_trials(prep, 100, 1234, opt);
    const TrialsSummary& s = slot->summary;

    const bool success_ok = s.success_fraction >= 0.8;
    const bool moment_ok = s.mean_sq_error <= 2.0 * s.eps_sq_xstar_sq;
    Outcome out;
    out.ok = success_ok && moment_ok;
    out.detail = fmt("success %.2f (need >= 0.80), E||x_T - x*||^2 = %.4g vs 2 eps^2 ||x*||^2 = %.4g",
                     s.success_fraction, s.mean_sq_error, 2.0 * s.eps_sq_xstar_sq);
    return out;
}

Outcome criterion_endtoend_standard() {
    return run_endtoend_trials(0.0, endtoend_runs.plain, SolveMode::standard, 0.1);
}

Outcome criterion_endtoend_ridge() {
    return run_endtoend_trials(1.0, endtoend_runs.ridge, SolveMode::standard, 0.1);
}

Outcome criterion_sparsity_law() {
    if (!endtoend_runs.plain) criterion_endtoend_standard();
    if (!endtoend_runs.ridge) criterion_endtoend_ridge();
    std::size_t runs = 0;
    bool ok = true;
    for (const auto* result : {&*endtoend_runs.plain, &*endtoend_runs.ridge}) {
        for (const RunReport& r : result->reports) {
            ++runs;
            ok = ok && r.sparsity_law_ok;
            ok = ok && r.output_nnz <= r.iterations + r.b_hat_nnz;
        }
    }
    return {ok, fmt("nnz(v_t) <= t + nnz(b_hat) held in all %zu runs", runs)};
}

Outcome criterion_output_sq() {
    InstanceSpec spec;
    spec.m = 20;
    spec.n = 15;
    spec.rank = 6;
    spec.law = SingularLaw::log_uniform;
    spec.sigma_min = 1.0;
    spec.sigma_max = 2.0;
    spec.rhs = RhsMode::random;
    spec.seed = 8899;
    const Instance inst = generate_instance(spec);

    // 12-sparse coefficients over the 20 rows
    Rng coeff_rng(777);
    std::vector<std::size_t> rows_avail(20);
    for (std::size_t i = 0; i < 20; ++i) rows_avail[i] = i;
    for (std::size_t i = 0; i < 12; ++i) {
        std::swap(rows_avail[i], rows_avail[i + coeff_rng.below(20 - i)]);
    }
    SparseVector v;
    v.dim = 20;
    v.indices.assign(rows_avail.begin(), rows_avail.begin() + 12);
    std::sort(v.indices.begin(), v.indices.end());
    for (std::size_t k = 0; k < 12; ++k) v.values.push_back(coeff_rng.gaussian());
    const SparseDescription desc(inst.sq, v);

    const std::vector<double> x = tmatvec(inst.a, v.to_dense());
    const double xsq = norm_sq(x);
    std::vector<double> probs(15);
    for (std::size_t j = 0; j < 15; ++j) probs[j] = x[j] * x[j] / xsq;
    const double s_delta = static_cast<double>(desc.support_size()) * desc.delta();

    Rng rng(31337);
    QueryLedger ledger;
    std::vector<std::size_t> counts(15, 0);
    const std::size_t draws = 100000;
    for (std::size_t k = 0; k < draws; ++k) ++counts[desc.sample(rng, ledger)];
    const double tv = tv_distance(counts, probs);
    const double mean_trials =
        static_cast<double>(ledger.snapshot().sample2) / static_cast<double>(draws);

    std::size_t norm_hits = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const double est = desc.estimate_norm(0.1, 0.05, rng, ledger);
        const double ratio = est / std::sqrt(xsq);
        norm_hits += (ratio >= 0.9 && ratio <= 1.1) ? 1 : 0;
    }

    const bool ok = tv < 0.02 && mean_trials >= 0.5 * s_delta && mean_trials <= 2.0 * s_delta &&
                    norm_hits >= 93;
    return {ok, fmt("tv %.4f (<0.02), trials/accept %.2f vs s*delta %.2f, norm hits %zu/100 (>=93)",
                    tv, mean_trials, s_delta, norm_hits)};
}

Outcome criterion_scaling() {
    InstanceSpec spec = endtoend_instance_spec();
    spec.noise_frac = 0.0;
    const auto rows = scaling_experiment(spec, {100, 400, 1600}, 0.5, 0.0, 4242);

    bool hp_identical = true;
    double q_lo = 1e300;
    double q_hi = 0.0;
    double dev = 0.0;
    for (const auto& row : rows) {
        hp_identical = hp_identical && row.eta == rows.front().eta &&
                       row.iterations == rows.front().iterations &&
                       row.col_samples == rows.front().col_samples &&
                       row.sketch_size == rows.front().sketch_size;
        const auto total = static_cast<double>(row.solve_counts.total());
        q_lo = std::min(q_lo, total);
        q_hi = std::max(q_hi, total);
        dev = std::max(dev, row.spectrum_deviation);
    }
    const bool queries_ok = q_hi <= 1.1 * q_lo;
    // superlinear: the time ratio beats the dimension ratio at each step
    const bool superlinear = rows[1].oracle_seconds > 4.0 * rows[0].oracle_seconds &&
                             rows[2].oracle_seconds > 4.0 * rows[1].oracle_seconds;
    const bool ok = hp_identical && queries_ok && superlinear && dev <= 1e-10;
    return {ok, fmt("hp identical %d, solve queries [%.0f, %.0f] (spread %.1f%%), oracle s "
                    "{%.3g, %.3g, %.3g}, spectrum dev %.2g",
                    hp_identical ? 1 : 0, q_lo, q_hi, 100.0 * (q_hi / q_lo - 1.0),
                    rows[0].oracle_seconds, rows[1].oracle_seconds, rows[2].oracle_seconds, dev)};
}

Outcome criterion_xstar_bound() {
    Rng rng(17);
    double worst_gap = 0.0;
    double worst_eq = 0.0;
    std::size_t eq_cases = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.below(10);
        const std::size_t n = 2 + rng.below(10);
        DenseMatrix a(m, n);
        for (auto& x : a.data) x = rng.gaussian();
        std::vector<double> b(m);
        for (auto& x : b) x = rng.gaussian();
        const Spectrum s = svd(a);
        const double op = s.sigma_max();
        double lambda = 0.0;
        const int branch = trial % 3;
        if (branch == 1) lambda = rng.uniform(0.0, 1.0) * op * op;
        if (branch == 2) lambda = (1.5 + rng.uniform01()) * op * op;  // ||A|| <= sqrt(lambda)

        const double bound = xstar_lower_bound(s, b, lambda);
        const double xn = norm(solve_exact(s, b, lambda));
        worst_gap = std::max(worst_gap, bound - xn);
        if (lambda > 0.0 && op <= std::sqrt(lambda)) {
            ++eq_cases;
            worst_eq = std::max(worst_eq, std::abs(bound - xn) / std::max(xn, 1e-30));
        }
    }
    const bool ok = worst_gap <= 1e-10 && worst_eq <= 1e-8 && eq_cases > 0;
    return {ok, fmt("max (bound - ||x*||) = %.2g, equality branch dev %.2g over %zu cases",
                    worst_gap, worst_eq, eq_cases)};
}

Outcome criterion_kaczmarz() {
    std::optional<TrialsResult> slot;
    return run_endtoend_trials(0.0, slot, SolveMode::kaczmarz, 0.0);
}

struct Criterion {
    int number;
    const char* label;
    std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "gradient moment identities (enumeration, C = 1)", criterion_gradient_moments},
        {2, "coefficient-space moments and D-norm variance bound", criterion_vspace_moments},
        {3, "sampler distribution laws (chi-square and TV)", criterion_distributions},
        {4, "rhs sketch error bounds (Monte Carlo)", criterion_sketch},
        {5, "end-to-end guarantee, standard mode", criterion_endtoend_standard},
        {6, "end-to-end guarantee, ridge-regularized", criterion_endtoend_ridge},
        {7, "sparsity law across all end-to-end runs", criterion_sparsity_law},
        {8, "output sample-query access (rejection sampling, norm)", criterion_output_sq},
        {9, "dimension independence of the randomized path", criterion_scaling},
        {10, "optimum-norm lower bound", criterion_xstar_bound},
        {11, "randomized Kaczmarz mode on consistent instances", criterion_kaczmarz},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    bool all_ok = true;
    for (const auto& criterion : criteria) {
        if (!selected.empty() && !selected.count(criterion.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.body();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s — %s (%.1f s)\n", outcome.ok ? "PASS" : "FAIL",
                    criterion.number, criterion.label, outcome.detail.c_str(), secs);
        std::fflush(stdout);
        all_ok = all_ok && outcome.ok;
    }
    return all_ok ? 0 : 1;
}
