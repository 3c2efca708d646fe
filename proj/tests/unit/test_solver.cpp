#include <doctest.h>

#include <cmath>
#include <vector>

#include "qireg/instance.hpp"
#include "qireg/oracle.hpp"
#include "qireg/solver.hpp"
#include "qireg/stats.hpp"
#include "qireg/svd.hpp"

using namespace qireg;

namespace {

SpectralBounds identity_bounds(std::size_t k) {
    SpectralBounds b;
    b.op_norm_upper = 1.0;
    b.sigma_lower = 1.0;
    b.xstar_norm_lower = 1.0;
    b.fro_norm = std::sqrt(static_cast<double>(k));
    return b;
}

}  // namespace

TEST_CASE("hyperparameters for the identity family") {
    const std::size_t k = 4;
    const HyperParams hp = derive_hyperparams(identity_bounds(k), 0.5, 0.0, 1.0);
    CHECK(hp.eta == doctest::Approx(0.25 / (32.0 * k)).epsilon(1e-15));
    CHECK(hp.col_samples == k);
    const double expected_t = std::log(8.0 / 0.25) / (hp.eta * 1.0);
    CHECK(hp.iterations == static_cast<std::uint64_t>(std::ceil(expected_t)));
}

TEST_CASE("hyperparameters at epsilon one on a single entry") {
    const HyperParams hp = derive_hyperparams(identity_bounds(1), 1.0, 0.0, 1.0);
    CHECK(hp.eta == doctest::Approx(1.0 / 32.0));
    CHECK(hp.iterations == 67);  // ceil(64 ln sqrt(8))
    CHECK(hp.col_samples == 1);
}

TEST_CASE("halving the sigma bound quarters the step and quadruples the iterations") {
    SpectralBounds loose = identity_bounds(4);
    loose.sigma_lower = 0.5;
    const HyperParams tight = derive_hyperparams(identity_bounds(4), 0.5, 0.0, 1.0);
    const HyperParams derived = derive_hyperparams(loose, 0.5, 0.0, 1.0);
    CHECK(derived.eta == doctest::Approx(tight.eta / 4.0).epsilon(1e-15));
    CHECK(std::llabs(static_cast<long long>(derived.iterations) -
                     16LL * static_cast<long long>(tight.iterations)) <= 16);
}

TEST_CASE("hyperparameter validation") {
    CHECK_THROWS_AS(derive_hyperparams(identity_bounds(2), 0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(derive_hyperparams(identity_bounds(2), 1.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(derive_hyperparams(identity_bounds(2), 0.5, -1.0, 1.0), std::invalid_argument);
    // lambda beyond the allowed multiple of ||A||_F ||A||
    CHECK_THROWS_AS(derive_hyperparams(identity_bounds(2), 0.5, 1e6, 1.0), std::invalid_argument);
}

TEST_CASE("gradient support sampling laws") {
    const SampledMatrix diag(std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 2.0}});
    Rng rng(40);
    QueryLedger ledger;
    std::size_t row1 = 0;
    for (int k = 0; k < 20000; ++k) row1 += sample_gradient_support(diag, 1, rng, ledger).row;
    CHECK(static_cast<double>(row1) / 20000.0 == doctest::Approx(0.8).epsilon(0.02));

    const SampledMatrix wide(std::vector<std::vector<double>>{{3.0, 4.0}});
    std::size_t col1 = 0;
    for (int k = 0; k < 20000; ++k) {
        const GradientSupport g = sample_gradient_support(wide, 1, rng, ledger);
        CHECK(g.row == 0);
        col1 += g.cols[0];
    }
    CHECK(static_cast<double>(col1) / 20000.0 == doctest::Approx(0.64).epsilon(0.02));
}

TEST_CASE("joint support law matches the entry-wise length-square distribution") {
    Rng init(77);
    std::vector<std::vector<double>> rows(3, std::vector<double>(3));
    for (auto& r : rows) {
        for (auto& v : r) v = init.gaussian();
    }
    const SampledMatrix a(rows);
    Rng rng(1234);
    QueryLedger ledger;
    std::vector<std::size_t> counts(9, 0);
    const std::size_t draws = 100000;
    for (std::size_t k = 0; k < draws; ++k) {
        const GradientSupport g = sample_gradient_support(a, 1, rng, ledger);
        ++counts[g.row * 3 + g.cols[0]];
    }
    std::vector<double> probs(9);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            probs[i * 3 + j] = rows[i][j] * rows[i][j] / a.fro_sq();
        }
    }
    CHECK(tv_distance(counts, probs) < 0.02);
}

TEST_CASE("update from zero lands on eta b_hat") {
    const SampledMatrix a(std::vector<std::vector<double>>{{1.0, 2.0}, {2.0, 1.0}});
    HyperParams hp;
    hp.eta = 0.01;
    hp.iterations = 1;
    hp.col_samples = 1;
    hp.sketch_size = 1;
    hp.lambda = 0.0;
    hp.epsilon = 0.5;

    SparseVector b_hat;
    b_hat.dim = 2;
    b_hat.indices = {0, 1};
    b_hat.values = {3.0, -1.0};

    SolverState state;
    QueryLedger ledger;
    const GradientSupport support{0, {1}};
    apply_update(state, support, b_hat, hp, a, ledger);
    CHECK(state.v.at(0) == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(state.v.at(1) == doctest::Approx(-0.01).epsilon(1e-15));
    CHECK(state.t == 1);
}

TEST_CASE("the optimum is a fixed point on the identity instance") {
    const SampledMatrix a(std::vector<std::vector<double>>{{1.0}});
    HyperParams hp;
    hp.eta = 0.03125;
    hp.iterations = 1;
    hp.col_samples = 1;
    hp.sketch_size = 1;
    hp.lambda = 0.0;
    hp.epsilon = 1.0;

    SparseVector b_hat;
    b_hat.dim = 1;
    b_hat.indices = {0};
    b_hat.values = {1.0};

    SolverState state;
    state.v[0] = 1.0;
    QueryLedger ledger;
    apply_update(state, GradientSupport{0, {0}}, b_hat, hp, a, ledger);
    CHECK(state.v.at(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("one update replays the dense coefficient recursion") {
    Rng rng(5150);
    std::vector<std::vector<double>> rows{{1.3, -0.4}, {0.7, 2.2}};
    const SampledMatrix a(rows);
    HyperParams hp;
    hp.eta = 0.02;
    hp.iterations = 1;
    hp.col_samples = 3;
    hp.sketch_size = 2;
    hp.lambda = 0.6;
    hp.epsilon = 0.5;

    SparseVector b_hat;
    b_hat.dim = 2;
    b_hat.indices = {0, 1};
    b_hat.values = {0.5, -1.5};

    SolverState state;
    state.v[0] = 0.9;
    state.v[1] = -0.2;
    const std::vector<double> v_before{0.9, -0.2};

    QueryLedger ledger;
    const GradientSupport support = sample_gradient_support(a, hp.col_samples, rng, ledger);
    apply_update(state, support, b_hat, hp, a, ledger);

    // dense replay of v' = (1 - eta lambda) v + eta b_hat - eta (F^2/C) sum_j <A_{*,c_j}, v>/A_{r,c_j} e_r
    std::vector<double> expected(2);
    for (std::size_t i = 0; i < 2; ++i) {
        expected[i] = (1.0 - hp.eta * hp.lambda) * v_before[i] + hp.eta * b_hat.values[i];
    }
    double acc = 0.0;
    for (std::size_t c : support.cols) {
        double inner = 0.0;
        for (std::size_t i = 0; i < 2; ++i) inner += rows[i][c] * v_before[i];
        acc += inner / rows[support.row][c];
    }
    expected[support.row] -=
        hp.eta * a.fro_sq() / static_cast<double>(hp.col_samples) * acc;

    CHECK(state.v.at(0) == doctest::Approx(expected[0]).epsilon(1e-12));
    CHECK(state.v.at(1) == doctest::Approx(expected[1]).epsilon(1e-12));
}

TEST_CASE("zero rhs solves to exactly zero") {
    const SampledMatrix a(std::vector<std::vector<double>>{{1.0, 0.5}, {0.5, 2.0}});
    const QueryVector b(std::vector<double>{0.0, 0.0});
    HyperParams hp;
    hp.eta = 0.01;
    hp.iterations = 50;
    hp.col_samples = 2;
    hp.sketch_size = 1;
    hp.lambda = 0.0;
    hp.epsilon = 0.5;
    Rng rng(2);
    QueryLedger ledger;
    const SolveOutcome out = solve(a, b, hp, rng, SolveMode::standard, ledger);
    CHECK(out.v.nnz() == 0);
    CHECK(out.sparsity_law_ok);
}

TEST_CASE("scalar instance hits the target error in most seeded runs") {
    const SampledMatrix a(std::vector<std::vector<double>>{{1.0}});
    const QueryVector b(std::vector<double>{1.0});
    const HyperParams hp = derive_hyperparams(identity_bounds(1), 0.5, 0.0, 1.0);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed * 7919 + 1);
        QueryLedger ledger;
        const SolveOutcome out = solve(a, b, hp, rng, SolveMode::standard, ledger);
        const double x = out.v.nnz() == 1 ? out.v.values[0] : 0.0;  // x = A^T v = v here
        hits += std::abs(x - 1.0) <= 0.5 ? 1 : 0;
    }
    CHECK(hits >= 80);
}

TEST_CASE("kaczmarz mode rejects regularized problems") {
    const SampledMatrix a(std::vector<std::vector<double>>{{1.0}});
    const QueryVector b(std::vector<double>{1.0});
    HyperParams hp = derive_hyperparams(identity_bounds(1), 0.5, 0.0, 1.0);
    hp.lambda = 0.1;
    Rng rng(3);
    QueryLedger ledger;
    CHECK_THROWS_AS(solve(a, b, hp, rng, SolveMode::kaczmarz, ledger), std::invalid_argument);
}

TEST_CASE("sampled stochastic gradients average to the exact gradient") {
    Rng init(64);
    DenseMatrix a(5, 4);
    for (auto& x : a.data) x = init.gaussian();
    std::vector<double> b(5), x(4);
    for (auto& v : b) v = init.gaussian();
    for (auto& v : x) v = init.gaussian();
    const double lambda = 0.3;

    const auto exact = grad_exact(a, b, lambda, x);
    Rng rng(12);
    const std::size_t draws = 40000;
    std::vector<double> mean(4, 0.0);
    for (std::size_t k = 0; k < draws; ++k) {
        const auto g = stochastic_gradient_x(a, b, lambda, x, 2, rng);
        for (std::size_t j = 0; j < 4; ++j) mean[j] += g[j];
    }
    for (auto& v : mean) v /= static_cast<double>(draws);
    // Monte-Carlo tolerance: a few standard errors of the gradient's spread
    const GradientMoments moments = enumerate_gradient_moments(a, b, lambda, x);
    const double se = std::sqrt(moments.variance / static_cast<double>(draws));
    CHECK(norm(sub(mean, exact)) <= 5.0 * se);
}

TEST_CASE("enumerated stochastic gradient is stationary at the optimum") {
    InstanceSpec spec;
    spec.m = 6;
    spec.n = 5;
    spec.rank = 3;
    spec.law = SingularLaw::log_uniform;
    spec.sigma_min = 1.0;
    spec.sigma_max = 2.0;
    spec.rhs = RhsMode::planted;
    spec.noise_frac = 0.0;  // b in the range of A
    spec.seed = 1001;
    const Instance inst = generate_instance(spec);
    const auto xstar = solve_exact(inst.a, inst.b, 0.0);
    const GradientMoments moments = enumerate_gradient_moments(inst.a, inst.b, 0.0, xstar);
    CHECK(norm(moments.mean) <= 1e-10 * fro_norm_sq(inst.a) * norm(xstar));
}

TEST_CASE("sparsity law holds along full runs") {
    InstanceSpec spec;
    spec.m = 12;
    spec.n = 10;
    spec.rank = 3;
    spec.law = SingularLaw::log_uniform;
    spec.sigma_min = 1.0;
    spec.sigma_max = 2.0;
    spec.rhs = RhsMode::planted;
    spec.noise_frac = 0.1;
    spec.seed = 2024;
    const Instance inst = generate_instance(spec);
    const Spectrum s = svd(inst.a);
    const SpectralBounds bounds = bounds_from_oracle(inst.a, s, inst.b, 0.0);
    const HyperParams hp = derive_hyperparams(bounds, 0.5, 0.0, norm(inst.b));
    const QueryVector b(inst.b);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Rng rng(seed);
        QueryLedger ledger;
        const SolveOutcome out = solve(inst.sq, b, hp, rng, SolveMode::standard, ledger);
        CHECK(out.sparsity_law_ok);
        CHECK(out.v.nnz() <= hp.iterations + out.b_hat_nnz);
    }
}

TEST_CASE("query counts are a deterministic function of the run and ignore tracing") {
    InstanceSpec spec;
    spec.m = 10;
    spec.n = 8;
    spec.rank = 3;
    spec.law = SingularLaw::log_uniform;
    spec.sigma_min = 1.0;
    spec.sigma_max = 2.0;
    spec.rhs = RhsMode::planted;
    spec.noise_frac = 0.0;
    spec.seed = 5;
    const Instance inst = generate_instance(spec);
    const Spectrum s = svd(inst.a);
    const SpectralBounds bounds = bounds_from_oracle(inst.a, s, inst.b, 0.0);
    const HyperParams hp = derive_hyperparams(bounds, 0.5, 0.0, norm(inst.b));
    const QueryVector b(inst.b);
    const auto xstar = solve_exact(s, inst.b, 0.0);

    QueryLedger plain_ledger;
    Rng rng1(99);
    const SolveOutcome plain = solve(inst.sq, b, hp, rng1, SolveMode::standard, plain_ledger);

    TraceOptions trace;
    trace.dense_a = &inst.a;
    trace.xstar = &xstar;
    trace.points = 5;
    QueryLedger traced_ledger;
    Rng rng2(99);
    const SolveOutcome traced = solve(inst.sq, b, hp, rng2, SolveMode::standard, traced_ledger, &trace);

    CHECK(plain.solve_counts == traced.solve_counts);
    CHECK(plain.sketch_counts == traced.sketch_counts);
    CHECK(traced.error_trace.size() == 5);
    CHECK(plain.v.indices == traced.v.indices);
    CHECK(plain.v.values == traced.v.values);
}

TEST_CASE("mean squared error trace decreases and ends below the guarantee") {
    InstanceSpec spec;
    spec.m = 10;
    spec.n = 8;
    spec.rank = 3;
    spec.law = SingularLaw::log_uniform;
    spec.sigma_min = 1.0;
    spec.sigma_max = 2.0;
    spec.rhs = RhsMode::planted;
    spec.noise_frac = 0.0;
    spec.seed = 31337;
    const double epsilon = 0.5;
    const Instance inst = generate_instance(spec);
    const Spectrum s = svd(inst.a);
    const SpectralBounds bounds = bounds_from_oracle(inst.a, s, inst.b, 0.0);
    const HyperParams hp = derive_hyperparams(bounds, epsilon, 0.0, norm(inst.b));
    const auto xstar = solve_exact(s, inst.b, 0.0);
    const QueryVector b(inst.b);

    TraceOptions trace;
    trace.dense_a = &inst.a;
    trace.xstar = &xstar;
    trace.points = 5;  // t = 0, T/4, T/2, 3T/4, T

    const std::size_t runs = 200;
    std::vector<std::vector<double>> traces;
    for (std::size_t run = 0; run < runs; ++run) {
        Rng rng(run * 104729 + 13);
        QueryLedger ledger;
        const SolveOutcome out = solve(inst.sq, b, hp, rng, SolveMode::standard, ledger, &trace);
        std::vector<double> errs;
        errs.reserve(out.error_trace.size());
        for (const auto& [t, e] : out.error_trace) errs.push_back(e);
        traces.push_back(std::move(errs));
    }
    const std::size_t points = traces.front().size();
    std::vector<double> means(points, 0.0);
    std::vector<double> ses(points, 0.0);
    for (std::size_t p = 0; p < points; ++p) {
        std::vector<double> column(runs);
        for (std::size_t r = 0; r < runs; ++r) column[r] = traces[r][p];
        const MeanStddev ms = mean_stddev(column);
        means[p] = ms.mean;
        ses[p] = ms.standard_error;
    }
    for (std::size_t p = 1; p < points; ++p) {
        CHECK(means[p] <= means[p - 1] + 2.0 * (ses[p] + ses[p - 1]));
    }
    const double xstar_sq = norm_sq(xstar);
    CHECK(means.back() <= 2.0 * epsilon * epsilon * xstar_sq);
    // the trace starts at ||x*||^2 because v = 0
    CHECK(means.front() == doctest::Approx(xstar_sq).epsilon(1e-9));
}
