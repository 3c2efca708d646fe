#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qireg/harness.hpp"
#include "qireg/io.hpp"
#include "qireg/svd.hpp"

namespace {

using namespace qireg;

struct CommonFlags {
    std::string matrix_file;
    std::string generate;
    std::string rhs = "planted:0.1";
    double epsilon = 0.3;
    double lambda = 0.0;
    std::uint64_t seed = 1;
    std::string mode = "standard";
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_mode = true) {
    auto* matrix = cmd->add_option("--matrix", f.matrix_file, "matrix file (coordinate or CSV)");
    auto* generate =
        cmd->add_option("--generate", f.generate, "instance spec, e.g. m=50,n=40,k=5,sv=1:2");
    matrix->excludes(generate);
    generate->excludes(matrix);
    cmd->add_option("--rhs", f.rhs, "rhs source: FILE | planted[:noise] | random")
        ->capture_default_str();
    cmd->add_option("--epsilon", f.epsilon, "target relative error in (0, 1]")
        ->capture_default_str();
    cmd->add_option("--lambda", f.lambda, "ridge regularization parameter")->capture_default_str();
    cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
    if (with_mode) {
        cmd->add_option("--mode", f.mode, "solver mode")
            ->check(CLI::IsMember({"standard", "kaczmarz"}))
            ->capture_default_str();
    }
    cmd->add_option("--out", f.out, "write JSON-lines report here (default: stdout)");
}

SolveMode parse_mode(const std::string& mode) {
    return mode == "kaczmarz" ? SolveMode::kaczmarz : SolveMode::standard;
}

// Builds the problem from flags. File-based matrices support planted, random,
// and file rhs; generated instances delegate to the instance module.
Instance load_instance(const CommonFlags& f) {
    if (f.generate.empty() == f.matrix_file.empty()) {
        throw std::invalid_argument("exactly one of --matrix or --generate is required");
    }

    std::string rhs_kind = f.rhs;
    double noise = 0.0;
    if (rhs_kind.rfind("planted", 0) == 0) {
        if (const auto colon = rhs_kind.find(':'); colon != std::string::npos) {
            noise = std::stod(rhs_kind.substr(colon + 1));
        }
        rhs_kind = "planted";
    }

    if (!f.generate.empty()) {
        InstanceSpec spec = InstanceSpec::parse(f.generate);
        if (f.generate.find("seed=") == std::string::npos) spec.seed = f.seed;
        if (rhs_kind == "planted") {
            spec.rhs = RhsMode::planted;
            spec.noise_frac = noise;
        } else if (rhs_kind == "random") {
            spec.rhs = RhsMode::random;
        } else {
            spec.rhs = RhsMode::random;  // geometry only; rhs loaded below
        }
        Instance inst = generate_instance(spec);
        if (rhs_kind != "planted" && rhs_kind != "random") {
            inst.b = read_vector(rhs_kind);
            if (inst.b.size() != inst.a.rows) {
                throw std::invalid_argument("rhs length does not match matrix rows");
            }
            inst.xstar_planted.clear();
        }
        return inst;
    }

    Instance inst;
    inst.a = read_matrix(f.matrix_file);
    inst.sq = SampledMatrix(inst.a.to_rows());
    if (rhs_kind == "planted") {
        Rng rng(f.seed ^ 0x706c616e74ull);
        const PlantedRhs planted = planted_rhs(inst.a, svd(inst.a), noise, rng);
        inst.b = planted.b;
        inst.xstar_planted = planted.xstar;
    } else if (rhs_kind == "random") {
        Rng rng(f.seed ^ 0x72616e64ull);
        inst.b.resize(inst.a.rows);
        for (auto& x : inst.b) x = rng.gaussian();
        const double bn = norm(inst.b);
        for (auto& x : inst.b) x /= bn;
    } else {
        inst.b = read_vector(rhs_kind);
        if (inst.b.size() != inst.a.rows) {
            throw std::invalid_argument("rhs length does not match matrix rows");
        }
    }
    return inst;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

int cmd_solve(const CommonFlags& f) {
    const Instance inst = load_instance(f);
    const PreparedInstance prep = prepare_instance(inst, f.epsilon, f.lambda);
    TrialOptions opt;
    opt.mode = parse_mode(f.mode);
    const RunReport report = run_single(prep, 0, f.seed, opt);

    std::ofstream file;
    open_out(f.out, file) << report_to_json(report) << '\n';

    std::cerr << "solve: relative error " << report.relative_error << " (target " << f.epsilon
              << "), nnz " << report.output_nnz << ", delta " << report.delta << ", queries "
              << (report.sketch_counts + report.solve_counts + report.output_counts).total()
              << ", " << report.wall_seconds << " s\n";
    return 0;
}

int cmd_trials(const CommonFlags& f, std::uint64_t trials) {
    const Instance inst = load_instance(f);
    const PreparedInstance prep = prepare_instance(inst, f.epsilon, f.lambda);
    TrialOptions opt;
    opt.mode = parse_mode(f.mode);
    const TrialsResult result = run_trials(prep, trials, f.seed, opt);

    std::ofstream file;
    write_reports_jsonl(open_out(f.out, file), result);

    const TrialsSummary& s = result.summary;
    std::cerr << "trials: " << s.trials << " runs, success fraction " << s.success_fraction
              << ", mean squared error " << s.mean_sq_error << " (eps^2 ||x*||^2 = "
              << s.eps_sq_xstar_sq << "), mean delta " << s.mean_delta << "\n";
    return 0;
}

int cmd_scale(const CommonFlags& f, const std::string& dims_text) {
    if (f.generate.empty()) throw std::invalid_argument("scale requires --generate");
    std::vector<std::size_t> dims;
    std::stringstream ss(dims_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) dims.push_back(std::stoul(tok));
    }
    if (dims.empty()) throw std::invalid_argument("no embedding dimensions given");

    InstanceSpec spec = InstanceSpec::parse(f.generate);
    if (f.generate.find("seed=") == std::string::npos) spec.seed = f.seed;
    spec.rhs = RhsMode::planted;
    spec.noise_frac = 0.0;

    const auto rows = scaling_experiment(spec, dims, f.epsilon, f.lambda, f.seed);

    std::ofstream file;
    std::ostream& out = open_out(f.out, file);
    for (const auto& row : rows) out << scale_row_to_json(row) << '\n';

    std::cerr << "ambient      eta            T        C      s   solve-queries   sgd-s     oracle-s  rel-err\n";
    for (const auto& row : rows) {
        std::ostringstream line;
        line.precision(4);
        line << row.ambient << "  " << row.eta << "  " << row.iterations << "  "
             << row.col_samples << "  " << row.sketch_size << "  "
             << row.solve_counts.total() << "  " << row.sgd_seconds << "  "
             << row.oracle_seconds << "  " << row.relative_error;
        std::cerr << line.str() << "\n";
    }
    return 0;
}

int cmd_selftest(std::uint64_t seed, bool full, const std::string& group) {
    MomentCheckParams moments;
    moments.seed = seed;
    moments.instances = full ? 100 : 20;
    DistributionCheckParams dist;
    dist.seed = seed + 1;
    SketchCheckParams sketch;
    sketch.seed = seed + 2;
    sketch.sketches = full ? 10000 : 2000;

    std::vector<CheckResult> all;
    const auto include = [&](const char* name) { return group == "all" || group == name; };
    if (include("moments")) {
        for (auto&& g : {gradient_moment_checks(moments), vspace_moment_checks(moments)}) {
            all.insert(all.end(), g.begin(), g.end());
        }
    }
    if (include("distributions")) {
        const auto g = distribution_checks(dist);
        all.insert(all.end(), g.begin(), g.end());
    }
    if (include("sketch")) {
        const auto g = sketch_checks(sketch);
        all.insert(all.end(), g.begin(), g.end());
    }
    bool ok = true;
    for (const auto& check : all) {
        std::cout << (check.ok ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail
                  << "\n";
        ok = ok && check.ok;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-inspired regression via length-square sampling"};
    app.require_subcommand(1);

    CommonFlags solve_flags;
    auto* solve_cmd = app.add_subcommand("solve", "run one seeded solve and report it");
    add_common(solve_cmd, solve_flags);

    CommonFlags trials_flags;
    std::uint64_t trials = 100;
    auto* trials_cmd = app.add_subcommand("trials", "run many seeded solves and summarize");
    add_common(trials_cmd, trials_flags);
    trials_cmd->add_option("--trials", trials, "number of independent runs")->capture_default_str();

    CommonFlags scale_flags;
    std::string dims = "100,400,1600";
    auto* scale_cmd =
        app.add_subcommand("scale", "embed a fixed-spectrum instance into growing dimensions");
    add_common(scale_cmd, scale_flags, false);
    scale_cmd->add_option("--dims", dims, "comma-separated ambient dimensions")
        ->capture_default_str();

    std::uint64_t selftest_seed = 20240901;
    bool selftest_full = false;
    std::string selftest_group = "all";
    auto* selftest_cmd =
        app.add_subcommand("selftest", "distribution, moment, and sketch verification checks");
    selftest_cmd->add_option("--seed", selftest_seed, "seed for the checks")->capture_default_str();
    selftest_cmd->add_flag("--full", selftest_full, "acceptance-sized check parameters");
    selftest_cmd->add_option("--group", selftest_group, "which checks to run")
        ->check(CLI::IsMember({"all", "moments", "distributions", "sketch"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(solve_flags);
        if (trials_cmd->parsed()) return cmd_trials(trials_flags, trials);
        if (scale_cmd->parsed()) return cmd_scale(scale_flags, dims);
        return cmd_selftest(selftest_seed, selftest_full, selftest_group);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
