#pragma once

#include <atomic>
#include <cstdint>

namespace qireg {

// Plain snapshot of ledger counters; supports phase accounting via subtraction.
struct LedgerCounts {
    std::uint64_t sample = 0;   // vector Sample()
    std::uint64_t sample1 = 0;  // matrix row sample
    std::uint64_t sample2 = 0;  // matrix column sample within a row
    std::uint64_t query = 0;    // entry queries (vector or matrix)
    std::uint64_t norm = 0;     // norm queries (row norm, Frobenius, vector norm)

    std::uint64_t total() const {
        return sample + sample1 + sample2 + query + norm;
    }

    LedgerCounts operator-(const LedgerCounts& other) const {
        return {sample - other.sample, sample1 - other.sample1, sample2 - other.sample2,
                query - other.query, norm - other.norm};
    }

    LedgerCounts operator+(const LedgerCounts& other) const {
        return {sample + other.sample, sample1 + other.sample1, sample2 + other.sample2,
                query + other.query, norm + other.norm};
    }

    bool operator==(const LedgerCounts& other) const = default;
};

// Monotone counters of sample-and-query traffic. Increments are relaxed
// atomics so independent samplers may share a ledger. tree_reads counts
// cumulative-tree node visits and is a cost diagnostic, not a query kind.
class QueryLedger {
public:
    void add_sample() noexcept { sample_.fetch_add(1, std::memory_order_relaxed); }
    void add_sample1() noexcept { sample1_.fetch_add(1, std::memory_order_relaxed); }
    void add_sample2() noexcept { sample2_.fetch_add(1, std::memory_order_relaxed); }
    void add_query(std::uint64_t k = 1) noexcept { query_.fetch_add(k, std::memory_order_relaxed); }
    void add_norm() noexcept { norm_.fetch_add(1, std::memory_order_relaxed); }
    void add_tree_reads(std::uint64_t k) noexcept { tree_reads_.fetch_add(k, std::memory_order_relaxed); }

    LedgerCounts snapshot() const noexcept {
        return {sample_.load(std::memory_order_relaxed),
                sample1_.load(std::memory_order_relaxed),
                sample2_.load(std::memory_order_relaxed),
                query_.load(std::memory_order_relaxed),
                norm_.load(std::memory_order_relaxed)};
    }

    std::uint64_t tree_reads() const noexcept { return tree_reads_.load(std::memory_order_relaxed); }
    std::uint64_t total() const noexcept { return snapshot().total(); }

    void reset() noexcept {
        sample_.store(0);
        sample1_.store(0);
        sample2_.store(0);
        query_.store(0);
        norm_.store(0);
        tree_reads_.store(0);
    }

private:
    std::atomic<std::uint64_t> sample_{0};
    std::atomic<std::uint64_t> sample1_{0};
    std::atomic<std::uint64_t> sample2_{0};
    std::atomic<std::uint64_t> query_{0};
    std::atomic<std::uint64_t> norm_{0};
    std::atomic<std::uint64_t> tree_reads_{0};
};

}  // namespace qireg
