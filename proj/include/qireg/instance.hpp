#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qireg/dense_matrix.hpp"
#include "qireg/rng.hpp"
#include "qireg/sampled_matrix.hpp"

namespace qireg {

enum class SingularLaw { explicit_list, log_uniform };
enum class RhsMode { planted, random, file };

/// Synthetic problem description: dimensions, rank, singular-value law, and
/// right-hand-side recipe. Text form (for --generate):
///   "m=50,n=40,k=5,sv=1:2"      log-uniform singular values in [1, 2]
///   "m=4,n=4,k=2,sv=2;1"        explicit singular values
struct InstanceSpec {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t rank = 0;
    SingularLaw law = SingularLaw::log_uniform;
    std::vector<double> sigma_list;  // explicit law
    double sigma_min = 1.0;
    double sigma_max = 1.0;
    RhsMode rhs = RhsMode::planted;
    double noise_frac = 0.0;  // planted: ||b - A x*|| = noise_frac * ||A x*||
    std::string rhs_file;
    std::uint64_t seed = 0;

    static InstanceSpec parse(const std::string& text);
    void validate() const;
};

struct Instance {
    DenseMatrix a;
    std::vector<double> b;
    std::vector<double> xstar_planted;  // empty unless planted rhs
    SampledMatrix sq;
};

// A = U diag(sigma) V^T with U, V orthonormalized Gaussian blocks; the
// singular values match the requested ones to ~1e-12 relative. Planted rhs
// uses a unit-norm x* in the row space plus noise orthogonal to the range.
Instance generate_instance(const InstanceSpec& spec);

// Embed into an ambient x ambient space without touching the spectral data:
// rows are zero-padded (b keeps its support) and columns rotated by a seeded
// orthonormal block, so ||A||_F, ||A||, sigma, ||b||, ||x*|| are preserved.
Instance embed_instance(const Instance& base, std::size_t ambient, std::uint64_t seed);

// dim x k with orthonormal columns, from Gaussian entries
DenseMatrix gaussian_orthonormal(std::size_t dim, std::size_t k, Rng& rng);

struct PlantedRhs {
    std::vector<double> b;
    std::vector<double> xstar;
};

// Plant a unit-norm solution in the row space of a decomposed matrix and add
// range-orthogonal noise of norm noise_frac * ||A x*||.
PlantedRhs planted_rhs(const DenseMatrix& a, const struct Spectrum& spectrum, double noise_frac,
                       Rng& rng);

}  // namespace qireg
