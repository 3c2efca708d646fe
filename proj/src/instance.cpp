#include "qireg/instance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "qireg/svd.hpp"

namespace qireg {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

std::uint64_t to_u64(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer for instance spec key '" + key + "': " + value);
    }
}

double to_f64(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number for instance spec key '" + key + "': " + value);
    }
}

}  // namespace

InstanceSpec InstanceSpec::parse(const std::string& text) {
    InstanceSpec spec;
    bool saw_sv = false;
    for (const auto& field : split(text, ',')) {
        if (field.empty()) continue;
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("instance spec field '" + field + "' is not key=value");
        }
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "m") {
            spec.m = static_cast<std::size_t>(to_u64(value, key));
        } else if (key == "n") {
            spec.n = static_cast<std::size_t>(to_u64(value, key));
        } else if (key == "k") {
            spec.rank = static_cast<std::size_t>(to_u64(value, key));
        } else if (key == "sv") {
            saw_sv = true;
            if (value.find(':') != std::string::npos) {
                const auto parts = split(value, ':');
                if (parts.size() != 2) {
                    throw std::invalid_argument("sv range must be 'min:max', got " + value);
                }
                spec.law = SingularLaw::log_uniform;
                spec.sigma_min = to_f64(parts[0], key);
                spec.sigma_max = to_f64(parts[1], key);
            } else {
                spec.law = SingularLaw::explicit_list;
                spec.sigma_list.clear();
                for (const auto& tok : split(value, ';')) spec.sigma_list.push_back(to_f64(tok, key));
            }
        } else if (key == "noise") {
            spec.noise_frac = to_f64(value, key);
        } else if (key == "seed") {
            spec.seed = to_u64(value, key);
        } else {
            throw std::invalid_argument("unknown instance spec key '" + key + "'");
        }
    }
    if (!saw_sv) {
        // default law keeps sigma in [1, 1]; explicit is clearer but optional
        spec.law = SingularLaw::log_uniform;
    }
    spec.validate();
    return spec;
}

void InstanceSpec::validate() const {
    if (m == 0 || n == 0) throw std::invalid_argument("instance dimensions must be positive");
    if (rank == 0 || rank > std::min(m, n)) {
        throw std::invalid_argument("instance rank must lie in [1, min(m, n)]");
    }
    if (law == SingularLaw::explicit_list) {
        if (sigma_list.size() != rank) {
            throw std::invalid_argument("explicit singular-value list must have rank entries");
        }
        for (double s : sigma_list) {
            if (!(s > 0.0)) throw std::invalid_argument("singular values must be positive");
        }
    } else {
        if (!(sigma_min > 0.0) || sigma_max < sigma_min) {
            throw std::invalid_argument("singular-value range must satisfy 0 < min <= max");
        }
    }
    if (noise_frac < 0.0) throw std::invalid_argument("negative noise fraction");
    if (rhs == RhsMode::planted && noise_frac > 0.0 && rank == m) {
        throw std::invalid_argument("orthogonal noise needs rank < m");
    }
}

DenseMatrix gaussian_orthonormal(std::size_t dim, std::size_t k, Rng& rng) {
    if (k > dim) throw std::invalid_argument("cannot orthonormalize more columns than rows");
    DenseMatrix q(dim, k);
    std::vector<double> col(dim);
    for (std::size_t j = 0; j < k; ++j) {
        for (int attempt = 0;; ++attempt) {
            for (auto& x : col) x = rng.gaussian();
            // modified Gram-Schmidt, twice for orthogonality near round-off
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t p = 0; p < j; ++p) {
                    double proj = 0.0;
                    for (std::size_t i = 0; i < dim; ++i) proj += q.at(i, p) * col[i];
                    for (std::size_t i = 0; i < dim; ++i) col[i] -= proj * q.at(i, p);
                }
            }
            const double nrm = norm(col);
            if (nrm > 1e-8) {
                for (std::size_t i = 0; i < dim; ++i) q.at(i, j) = col[i] / nrm;
                break;
            }
            if (attempt > 16) throw std::runtime_error("orthonormalization failed to converge");
        }
    }
    return q;
}

Instance generate_instance(const InstanceSpec& spec) {
    spec.validate();
    if (spec.rhs == RhsMode::file) {
        throw std::invalid_argument("file rhs is loaded by the caller, not generated");
    }
    Rng rng(spec.seed);

    std::vector<double> sigma;
    if (spec.law == SingularLaw::explicit_list) {
        sigma = spec.sigma_list;
    } else {
        sigma.resize(spec.rank);
        const double lo = std::log(spec.sigma_min);
        const double hi = std::log(spec.sigma_max);
        for (auto& s : sigma) s = std::exp(rng.uniform(lo, hi));
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<>());

    const DenseMatrix u = gaussian_orthonormal(spec.m, spec.rank, rng);
    const DenseMatrix v = gaussian_orthonormal(spec.n, spec.rank, rng);

    Instance inst;
    inst.a = DenseMatrix(spec.m, spec.n);
    for (std::size_t i = 0; i < spec.m; ++i) {
        for (std::size_t k = 0; k < spec.rank; ++k) {
            const double us = u.at(i, k) * sigma[k];
            if (us == 0.0) continue;
            for (std::size_t j = 0; j < spec.n; ++j) inst.a.at(i, j) += us * v.at(j, k);
        }
    }

    if (spec.rhs == RhsMode::planted) {
        // unit-norm solution in the row space
        std::vector<double> z(spec.rank);
        for (auto& x : z) x = rng.gaussian();
        inst.xstar_planted.assign(spec.n, 0.0);
        for (std::size_t k = 0; k < spec.rank; ++k) {
            for (std::size_t j = 0; j < spec.n; ++j) inst.xstar_planted[j] += v.at(j, k) * z[k];
        }
        const double xn = norm(inst.xstar_planted);
        for (auto& x : inst.xstar_planted) x /= xn;

        inst.b = matvec(inst.a, inst.xstar_planted);
        if (spec.noise_frac > 0.0) {
            std::vector<double> g(spec.m);
            for (auto& x : g) x = rng.gaussian();
            // project out the range of A so the noise cannot move x*
            for (std::size_t k = 0; k < spec.rank; ++k) {
                double proj = 0.0;
                for (std::size_t i = 0; i < spec.m; ++i) proj += u.at(i, k) * g[i];
                for (std::size_t i = 0; i < spec.m; ++i) g[i] -= proj * u.at(i, k);
            }
            const double gn = norm(g);
            if (gn <= 1e-12) throw std::runtime_error("degenerate orthogonal noise draw");
            const double target = spec.noise_frac * norm(inst.b);
            axpy(target / gn, g, inst.b);
        }
    } else {
        inst.b.resize(spec.m);
        for (auto& x : inst.b) x = rng.gaussian();
        const double bn = norm(inst.b);
        for (auto& x : inst.b) x /= bn;
    }

    inst.sq = SampledMatrix(inst.a.to_rows());
    return inst;
}

PlantedRhs planted_rhs(const DenseMatrix& a, const Spectrum& spectrum, double noise_frac, Rng& rng) {
    if (spectrum.rank == 0) throw std::invalid_argument("cannot plant a solution for a zero matrix");
    if (noise_frac < 0.0) throw std::invalid_argument("negative noise fraction");
    if (noise_frac > 0.0 && spectrum.rank == a.rows) {
        throw std::invalid_argument("orthogonal noise needs rank < m");
    }
    PlantedRhs out;
    out.xstar.assign(a.cols, 0.0);
    for (std::size_t k = 0; k < spectrum.rank; ++k) {
        const double z = rng.gaussian();
        for (std::size_t j = 0; j < a.cols; ++j) out.xstar[j] += spectrum.v.at(j, k) * z;
    }
    const double xn = norm(out.xstar);
    for (auto& x : out.xstar) x /= xn;

    out.b = matvec(a, out.xstar);
    if (noise_frac > 0.0) {
        std::vector<double> g(a.rows);
        for (auto& x : g) x = rng.gaussian();
        for (std::size_t k = 0; k < spectrum.rank; ++k) {
            double proj = 0.0;
            for (std::size_t i = 0; i < a.rows; ++i) proj += spectrum.u.at(i, k) * g[i];
            for (std::size_t i = 0; i < a.rows; ++i) g[i] -= proj * spectrum.u.at(i, k);
        }
        const double gn = norm(g);
        if (gn <= 1e-12) throw std::runtime_error("degenerate orthogonal noise draw");
        axpy(noise_frac * norm(out.b) / gn, g, out.b);
    }
    return out;
}

Instance embed_instance(const Instance& base, std::size_t ambient, std::uint64_t seed) {
    const std::size_t m0 = base.a.rows;
    const std::size_t n0 = base.a.cols;
    if (ambient < std::max(m0, n0)) {
        throw std::invalid_argument("ambient dimension smaller than the base instance");
    }
    Rng rng(seed);
    const DenseMatrix r = gaussian_orthonormal(ambient, n0, rng);  // right rotation block

    Instance inst;
    inst.a = DenseMatrix(ambient, ambient);
    for (std::size_t i = 0; i < m0; ++i) {
        for (std::size_t k = 0; k < n0; ++k) {
            const double aik = base.a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < ambient; ++j) inst.a.at(i, j) += aik * r.at(j, k);
        }
    }
    inst.b.assign(ambient, 0.0);
    std::copy(base.b.begin(), base.b.end(), inst.b.begin());
    if (!base.xstar_planted.empty()) {
        inst.xstar_planted.assign(ambient, 0.0);
        for (std::size_t k = 0; k < n0; ++k) {
            const double xk = base.xstar_planted[k];
            if (xk == 0.0) continue;
            for (std::size_t j = 0; j < ambient; ++j) inst.xstar_planted[j] += xk * r.at(j, k);
        }
    }
    inst.sq = SampledMatrix(inst.a.to_rows());
    return inst;
}

}  // namespace qireg
