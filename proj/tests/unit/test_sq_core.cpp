#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "qireg/ledger.hpp"
#include "qireg/rng.hpp"
#include "qireg/sampled_matrix.hpp"
#include "qireg/sampled_vector.hpp"
#include "qireg/stats.hpp"

using namespace qireg;

TEST_CASE("vector build computes the squared-norm tree") {
    const SampledVector sv(std::vector<double>{3.0, 4.0});
    CHECK(sv.sqnorm() == doctest::Approx(25.0).epsilon(1e-15));
    QueryLedger ledger;
    CHECK(sv.norm(ledger) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(ledger.snapshot().norm == 1);
    CHECK(sv.tree_consistent());
}

TEST_CASE("vector build rejects degenerate input") {
    CHECK_THROWS_WITH_AS(SampledVector(std::vector<double>{}), "empty vector",
                         std::invalid_argument);
    CHECK_THROWS_AS(SampledVector(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(SampledVector(std::vector<double>{1.0, INFINITY}), std::invalid_argument);
}

TEST_CASE("all-ones vector has unit leaves") {
    const SampledVector sv(std::vector<double>{1.0, 1.0, 1.0, 1.0});
    CHECK(sv.sqnorm() == doctest::Approx(4.0));
    for (std::size_t i = 0; i < 4; ++i) CHECK(sv.value(i) == 1.0);
    CHECK(sv.tree_consistent());
}

TEST_CASE("vector sampling follows the length-square law") {
    const SampledVector sv(std::vector<double>{3.0, 4.0});
    Rng rng(12345);
    QueryLedger ledger;
    std::size_t ones = 0;
    const std::size_t draws = 100000;
    for (std::size_t k = 0; k < draws; ++k) ones += sv.sample(rng, ledger);
    const double freq = static_cast<double>(ones) / draws;
    CHECK(freq == doctest::Approx(0.64).epsilon(0.02));
    CHECK(ledger.snapshot().sample == draws);
    // one tree read per level: ceil(log2 2) = 1
    CHECK(ledger.tree_reads() == draws);
}

TEST_CASE("sampling a vector with one nonzero entry always returns it") {
    const SampledVector sv(std::vector<double>{0.0, 0.0, 5.0});
    Rng rng(99);
    QueryLedger ledger;
    for (int k = 0; k < 1000; ++k) CHECK(sv.sample(rng, ledger) == 2);
}

TEST_CASE("uniform sampling passes a chi-square test at the 99.9% level") {
    const SampledVector sv(std::vector<double>{1.0, 1.0, 1.0, 1.0});
    Rng rng(777);
    QueryLedger ledger;
    std::vector<std::size_t> counts(4, 0);
    for (std::size_t k = 0; k < 100000; ++k) ++counts[sv.sample(rng, ledger)];
    const double stat = chi_square_stat(counts, std::vector<double>(4, 0.25));
    CHECK(chi_square_tail(stat, 3) >= 1e-3);
}

TEST_CASE("sampling the zero vector fails loudly") {
    const SampledVector sv(std::vector<double>{0.0, 0.0});
    Rng rng(1);
    QueryLedger ledger;
    CHECK_THROWS_WITH_AS(sv.sample(rng, ledger), "cannot sample zero vector", std::domain_error);
}

TEST_CASE("vector query and norm") {
    const SampledVector sv(std::vector<double>{3.0, 4.0});
    QueryLedger ledger;
    CHECK(sv.query(1, ledger) == 4.0);
    CHECK_THROWS_AS(sv.query(2, ledger), std::out_of_range);
    const SampledVector zero(std::vector<double>{0.0});
    CHECK(zero.norm(ledger) == 0.0);
}

TEST_CASE("matrix build aggregates row norms") {
    const SampledMatrix id(std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}});
    CHECK(id.fro_sq() == doctest::Approx(2.0));
    CHECK(id.row_norms().value(0) == doctest::Approx(1.0));
    CHECK(id.row_norms().value(1) == doctest::Approx(1.0));

    const SampledMatrix rank1(std::vector<std::vector<double>>{{1.0, 2.0}, {2.0, 4.0}});
    CHECK(rank1.fro_sq() == doctest::Approx(25.0));
    CHECK(rank1.row_norms().value(0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(rank1.row_norms().value(1) == doctest::Approx(2.0 * std::sqrt(5.0)));
}

TEST_CASE("zero matrices build but refuse to sample") {
    const SampledMatrix zero(std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
    CHECK(zero.fro_sq() == 0.0);
    Rng rng(5);
    QueryLedger ledger;
    CHECK_THROWS_AS(zero.sample_row(rng, ledger), std::domain_error);
}

TEST_CASE("ragged rows are rejected") {
    CHECK_THROWS_AS(SampledMatrix(std::vector<std::vector<double>>{{1.0, 2.0}, {3.0}}),
                    std::invalid_argument);
}

TEST_CASE("row sampler follows the row-norm law") {
    const SampledMatrix diag(std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 2.0}});
    Rng rng(4242);
    QueryLedger ledger;
    std::size_t row1 = 0;
    const std::size_t draws = 100000;
    for (std::size_t k = 0; k < draws; ++k) row1 += diag.sample_row(rng, ledger);
    CHECK(static_cast<double>(row1) / draws == doctest::Approx(0.8).epsilon(0.01));
    CHECK(ledger.snapshot().sample1 == draws);
}

TEST_CASE("column sampler conditions on the row") {
    const SampledMatrix a(std::vector<std::vector<double>>{{3.0, 4.0}, {0.0, 0.0}});
    Rng rng(31);
    QueryLedger ledger;
    std::size_t col1 = 0;
    const std::size_t draws = 100000;
    for (std::size_t k = 0; k < draws; ++k) col1 += a.sample_col(0, rng, ledger);
    CHECK(static_cast<double>(col1) / draws == doctest::Approx(0.64).epsilon(0.02));
    CHECK(ledger.snapshot().sample2 == draws);

    CHECK_THROWS_AS(a.sample_col(1, rng, ledger), std::domain_error);  // zero row
    CHECK_THROWS_AS(a.sample_col(7, rng, ledger), std::out_of_range);
}

TEST_CASE("matrix query, row norm, and Frobenius norm") {
    const SampledMatrix a(std::vector<std::vector<double>>{{3.0, 4.0}, {0.0, 0.0}});
    QueryLedger ledger;
    CHECK(a.entry(0, 1, ledger) == 4.0);
    CHECK(a.row_norm(0, ledger) == doctest::Approx(5.0));
    CHECK(a.fro_norm(ledger) == doctest::Approx(5.0));
    CHECK_THROWS_AS(a.entry(0, 9, ledger), std::out_of_range);
    CHECK(ledger.snapshot().query == 1);
    CHECK(ledger.snapshot().norm == 2);
}

TEST_CASE("empirical distribution stays within 0.02 total variation") {
    Rng seed_rng(2024);
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t n = 8 + seed_rng.below(57);  // up to 64 entries
        std::vector<double> values(n);
        for (auto& v : values) v = seed_rng.gaussian();
        const SampledVector sv(values);
        std::vector<double> probs(n);
        for (std::size_t i = 0; i < n; ++i) probs[i] = values[i] * values[i] / sv.sqnorm();

        Rng rng(1000 + static_cast<std::uint64_t>(trial));
        QueryLedger ledger;
        std::vector<std::size_t> counts(n, 0);
        for (std::size_t k = 0; k < 100000; ++k) ++counts[sv.sample(rng, ledger)];
        CHECK(tv_distance(counts, probs) < 0.02);
    }
}

TEST_CASE("tree stays consistent for random inputs") {
    Rng rng(555);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + rng.below(100);
        std::vector<double> values(n);
        for (auto& v : values) v = rng.gaussian() * std::exp(rng.uniform(-8.0, 8.0));
        CHECK(SampledVector(values).tree_consistent(1e-12));
    }
}

TEST_CASE("each sample costs exactly ceil(log2 n) tree reads") {
    Rng rng(9);
    QueryLedger ledger;
    const SampledVector five(std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0});
    five.sample(rng, ledger);
    CHECK(ledger.tree_reads() == 3);  // ceil(log2 5)

    QueryLedger single_ledger;
    const SampledVector one(std::vector<double>{2.0});
    one.sample(rng, single_ledger);
    CHECK(single_ledger.tree_reads() == 0);
}

TEST_CASE("identical seeds give identical sample sequences") {
    std::vector<double> values(37);
    Rng init(3);
    for (auto& v : values) v = init.gaussian();
    const SampledVector sv(values);

    QueryLedger ledger;
    std::vector<std::size_t> first, second;
    Rng a(123456), b(123456);
    for (int k = 0; k < 200; ++k) first.push_back(sv.sample(a, ledger));
    for (int k = 0; k < 200; ++k) second.push_back(sv.sample(b, ledger));
    CHECK(first == second);
}

TEST_CASE("ledger tolerates concurrent increments") {
    const SampledVector sv(std::vector<double>{1.0, 2.0, 3.0});
    QueryLedger ledger;
    const std::size_t per_thread = 20000;
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t) {
        pool.emplace_back([&, t] {
            Rng rng(static_cast<std::uint64_t>(t) + 1);
            for (std::size_t k = 0; k < per_thread; ++k) sv.sample(rng, ledger);
        });
    }
    for (auto& t : pool) t.join();
    CHECK(ledger.snapshot().sample == 4 * per_thread);
    CHECK(ledger.snapshot().total() == 4 * per_thread);
}
