#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qireg/instance.hpp"
#include "qireg/ledger.hpp"
#include "qireg/oracle.hpp"
#include "qireg/solver.hpp"

namespace qireg {

/// Everything run_trials needs once per instance: spectrum-derived bounds, the
/// exact optimum, and the hyperparameters shared by every trial.
struct PreparedInstance {
    const Instance* instance = nullptr;
    Spectrum spectrum;
    SpectralBounds bounds;
    std::vector<double> xstar;
    double xstar_norm = 0.0;
    HyperParams hp;
    double lambda = 0.0;
    double epsilon = 0.0;
};

PreparedInstance prepare_instance(const Instance& inst, double epsilon, double lambda);

struct RunReport {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    std::string mode;
    double epsilon = 0.0;
    double lambda = 0.0;
    double eta = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t col_samples = 0;
    std::uint64_t sketch_size = 0;
    double relative_error = 0.0;  // ||x - x*|| / ||x*||; absolute when x* = 0
    bool xstar_is_zero = false;
    double delta = 0.0;  // measured cancellation constant
    std::uint64_t output_nnz = 0;
    std::uint64_t b_hat_nnz = 0;
    bool sketch_bypassed = false;
    bool sparsity_law_ok = true;
    LedgerCounts sketch_counts;
    LedgerCounts solve_counts;
    LedgerCounts output_counts;
    double wall_seconds = 0.0;  // in-memory diagnostic; not serialized
    std::vector<std::pair<std::uint64_t, double>> error_trace;
};

struct TrialOptions {
    SolveMode mode = SolveMode::standard;
    std::size_t output_samples = 4;
    bool trace = false;
    std::size_t trace_points = 33;
};

RunReport run_single(const PreparedInstance& prep, std::uint64_t trial_index, std::uint64_t seed,
                     const TrialOptions& opt);

struct TrialsSummary {
    std::uint64_t trials = 0;
    std::uint64_t master_seed = 0;
    std::string mode;
    double epsilon = 0.0;
    double lambda = 0.0;
    double success_fraction = 0.0;   // relative_error <= epsilon
    double mean_sq_error = 0.0;      // mean ||x - x*||^2
    double eps_sq_xstar_sq = 0.0;    // epsilon^2 ||x*||^2 reference
    double mean_delta = 0.0;
    double mean_output_nnz = 0.0;
    double mean_total_queries = 0.0;
    bool all_sparsity_ok = true;
};

struct TrialsResult {
    std::vector<RunReport> reports;
    TrialsSummary summary;
};

// Runs `trials` independent solves; trial i uses seed master_seed xor i.
// Worker count from QIREG_THREADS (default: hardware concurrency).
TrialsResult run_trials(const PreparedInstance& prep, std::uint64_t trials,
                        std::uint64_t master_seed, const TrialOptions& opt);

// JSON-lines output: one trial object per line followed by one summary object.
// Byte-deterministic for fixed inputs, flags, and master seed.
void write_reports_jsonl(std::ostream& out, const TrialsResult& result);
std::string report_to_json(const RunReport& report);
std::string summary_to_json(const TrialsSummary& summary);

struct ScaleRow {
    std::size_t ambient = 0;
    double eta = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t col_samples = 0;
    std::uint64_t sketch_size = 0;
    LedgerCounts solve_counts;
    double sgd_seconds = 0.0;
    double oracle_seconds = 0.0;   // dense svd + exact solve
    double spectrum_deviation = 0.0;  // max |sigma_i(embedded) - sigma_i(base)|
    double relative_error = 0.0;
};

// Embeds a fixed-spectrum base instance into growing ambient dimensions and
// solves each with identical hyperparameters (derived once from the base).
std::vector<ScaleRow> scaling_experiment(const InstanceSpec& base_spec,
                                         const std::vector<std::size_t>& dims, double epsilon,
                                         double lambda, std::uint64_t master_seed);
std::string scale_row_to_json(const ScaleRow& row);

// ---------------------------------------------------------------------------
// Verification drivers shared by the selftest subcommand and the acceptance
// suite; each returns named pass/fail results with measured statistics.

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct MomentCheckParams {
    std::size_t instances = 20;
    std::size_t max_dim = 8;
    double tol = 1e-10;
    std::uint64_t seed = 20240901;
};
std::vector<CheckResult> gradient_moment_checks(const MomentCheckParams& params);
std::vector<CheckResult> vspace_moment_checks(const MomentCheckParams& params);

struct DistributionCheckParams {
    std::size_t draws = 100000;
    double significance = 1e-3;
    double tv_limit = 0.02;
    std::uint64_t seed = 987654321;
};
std::vector<CheckResult> distribution_checks(const DistributionCheckParams& params);

struct SketchCheckParams {
    std::size_t sketches = 10000;
    std::size_t m = 30;
    std::size_t n = 20;
    std::size_t rank = 6;
    std::size_t s = 200;
    double slack = 1.1;
    std::uint64_t seed = 13572468;
};
std::vector<CheckResult> sketch_checks(const SketchCheckParams& params);

// worker count for concurrent trials: QIREG_THREADS or hardware concurrency
std::size_t worker_count();

}  // namespace qireg
