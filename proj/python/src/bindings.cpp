#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qireg/description.hpp"
#include "qireg/harness.hpp"
#include "qireg/oracle.hpp"
#include "qireg/sketch.hpp"
#include "qireg/solver.hpp"
#include "qireg/svd.hpp"

namespace py = pybind11;
using namespace qireg;

namespace {

DenseMatrix dense_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw std::invalid_argument("empty matrix");
    DenseMatrix a(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < a.rows; ++i) {
        if (rows[i].size() != a.cols) throw std::invalid_argument("ragged rows");
        for (std::size_t j = 0; j < a.cols; ++j) a.at(i, j) = rows[i][j];
    }
    return a;
}

py::dict counts_dict(const LedgerCounts& c) {
    py::dict d;
    d["sample"] = c.sample;
    d["sample1"] = c.sample1;
    d["sample2"] = c.sample2;
    d["query"] = c.query;
    d["norm"] = c.norm;
    d["total"] = c.total();
    return d;
}

SolveMode mode_from_string(const std::string& mode) {
    if (mode == "standard") return SolveMode::standard;
    if (mode == "kaczmarz") return SolveMode::kaczmarz;
    throw std::invalid_argument("mode must be 'standard' or 'kaczmarz'");
}

// One seeded run against list-of-rows input; bounds and the exact optimum
// come from the dense oracle.
py::dict solve_instance(const std::vector<std::vector<double>>& rows, const std::vector<double>& b,
                        double epsilon, double lambda, std::uint64_t seed,
                        const std::string& mode) {
    Instance inst;
    inst.a = dense_from_rows(rows);
    inst.b = b;
    inst.sq = SampledMatrix(rows);
    const PreparedInstance prep = prepare_instance(inst, epsilon, lambda);

    Rng rng(seed);
    QueryLedger ledger;
    const QueryVector qb(b);
    const SolveOutcome outcome =
        solve(inst.sq, qb, prep.hp, rng, mode_from_string(mode), ledger);

    const std::vector<double> x = tmatvec(inst.a, outcome.v.to_dense());
    const double err = norm(sub(x, prep.xstar));

    py::dict out;
    out["indices"] = outcome.v.indices;
    out["coefficients"] = outcome.v.values;
    out["x"] = x;
    out["xstar"] = prep.xstar;
    out["relative_error"] =
        prep.xstar_norm > 0.0 ? err / prep.xstar_norm : norm(x);
    out["epsilon"] = epsilon;
    out["lambda"] = lambda;
    out["eta"] = prep.hp.eta;
    out["iterations"] = prep.hp.iterations;
    out["col_samples"] = prep.hp.col_samples;
    out["sketch_size"] = prep.hp.sketch_size;
    out["b_hat_nnz"] = outcome.b_hat_nnz;
    out["sketch_bypassed"] = outcome.sketch_bypassed;
    out["sparsity_law_ok"] = outcome.sparsity_law_ok;
    out["queries"] = counts_dict(outcome.sketch_counts + outcome.solve_counts);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum-inspired regression: length-square sampling structures, the stochastic "
              "coefficient solver, and the dense oracle suite.";

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform01", &Rng::uniform01)
        .def("gaussian", &Rng::gaussian);

    py::class_<QueryLedger>(m, "QueryLedger")
        .def(py::init<>())
        .def("counts", [](const QueryLedger& l) { return counts_dict(l.snapshot()); })
        .def("total", &QueryLedger::total)
        .def("tree_reads", &QueryLedger::tree_reads)
        .def("reset", &QueryLedger::reset);

    py::class_<SampledVector>(m, "SampledVector")
        .def(py::init<std::vector<double>>(), py::arg("values"))
        .def("sample", &SampledVector::sample, py::arg("rng"), py::arg("ledger"))
        .def("query", &SampledVector::query, py::arg("i"), py::arg("ledger"))
        .def("norm", &SampledVector::norm, py::arg("ledger"))
        .def_property_readonly("size", &SampledVector::size)
        .def_property_readonly("sqnorm", &SampledVector::sqnorm);

    py::class_<SampledMatrix>(m, "SampledMatrix")
        .def(py::init<const std::vector<std::vector<double>>&>(), py::arg("rows"))
        .def("sample_row", &SampledMatrix::sample_row, py::arg("rng"), py::arg("ledger"))
        .def("sample_col", &SampledMatrix::sample_col, py::arg("i"), py::arg("rng"),
             py::arg("ledger"))
        .def("entry", &SampledMatrix::entry, py::arg("i"), py::arg("j"), py::arg("ledger"))
        .def("row_norm", &SampledMatrix::row_norm, py::arg("i"), py::arg("ledger"))
        .def("fro_norm", &SampledMatrix::fro_norm, py::arg("ledger"))
        .def_property_readonly("rows", &SampledMatrix::rows)
        .def_property_readonly("cols", &SampledMatrix::cols)
        .def_property_readonly("fro_sq", &SampledMatrix::fro_sq);

    py::class_<SparseDescription>(m, "SparseDescription")
        .def(py::init([](const SampledMatrix& a, const std::vector<std::size_t>& indices,
                         const std::vector<double>& values) {
                 SparseVector v;
                 v.dim = a.rows();
                 v.indices = indices;
                 v.values = values;
                 return SparseDescription(a, std::move(v));
             }),
             py::arg("matrix"), py::arg("indices"), py::arg("values"),
             py::keep_alive<1, 2>())  // the matrix must outlive the description
        .def("query", &SparseDescription::query, py::arg("j"), py::arg("ledger"))
        .def("sample", &SparseDescription::sample, py::arg("rng"), py::arg("ledger"),
             py::arg("max_trials") = 0)
        .def("estimate_norm", &SparseDescription::estimate_norm, py::arg("eps_est"),
             py::arg("delta"), py::arg("rng"), py::arg("ledger"))
        .def("delta", [](const SparseDescription& d) { return d.delta(); })
        .def_property_readonly("support_size", &SparseDescription::support_size)
        .def_property_readonly("z", &SparseDescription::z);

    py::class_<SpectralBounds>(m, "SpectralBounds")
        .def(py::init<>())
        .def_readwrite("op_norm_upper", &SpectralBounds::op_norm_upper)
        .def_readwrite("sigma_lower", &SpectralBounds::sigma_lower)
        .def_readwrite("xstar_norm_lower", &SpectralBounds::xstar_norm_lower)
        .def_readwrite("fro_norm", &SpectralBounds::fro_norm);

    py::class_<HyperParams>(m, "HyperParams")
        .def_readonly("eta", &HyperParams::eta)
        .def_readonly("iterations", &HyperParams::iterations)
        .def_readonly("col_samples", &HyperParams::col_samples)
        .def_readonly("sketch_size", &HyperParams::sketch_size)
        .def_readonly("lambda_", &HyperParams::lambda)
        .def_readonly("epsilon", &HyperParams::epsilon);

    m.def("derive_hyperparams", &derive_hyperparams, py::arg("bounds"), py::arg("epsilon"),
          py::arg("lambda_"), py::arg("b_norm"));
    m.def("choose_s", &choose_s, py::arg("bounds"), py::arg("b_norm"), py::arg("epsilon"),
          py::arg("lambda_"));

    m.def(
        "svd_values",
        [](const std::vector<std::vector<double>>& rows) { return svd(dense_from_rows(rows)).sigma; },
        py::arg("rows"), "Singular values in descending order (dense oracle).");
    m.def(
        "solve_exact",
        [](const std::vector<std::vector<double>>& rows, const std::vector<double>& b,
           double lambda) { return solve_exact(dense_from_rows(rows), b, lambda); },
        py::arg("rows"), py::arg("b"), py::arg("lambda_"));
    m.def(
        "xstar_lower_bound",
        [](const std::vector<std::vector<double>>& rows, const std::vector<double>& b,
           double lambda) { return xstar_lower_bound(dense_from_rows(rows), b, lambda); },
        py::arg("rows"), py::arg("b"), py::arg("lambda_"));
    m.def(
        "delta_exact",
        [](const std::vector<std::vector<double>>& rows, const std::vector<double>& v,
           const std::vector<double>& x) { return delta_exact(dense_from_rows(rows), v, x); },
        py::arg("rows"), py::arg("v"), py::arg("x"));
    m.def(
        "sparsify_b",
        [](const SampledMatrix& a, const std::vector<double>& b, std::size_t s, std::uint64_t seed) {
            Rng rng(seed);
            QueryLedger ledger;
            const SparseVector out = sparsify_b(a, QueryVector(b), s, rng, ledger);
            return py::make_tuple(out.indices, out.values);
        },
        py::arg("matrix"), py::arg("b"), py::arg("s"), py::arg("seed"));

    m.def("solve_instance", &solve_instance, py::arg("rows"), py::arg("b"), py::arg("epsilon"),
          py::arg("lambda_") = 0.0, py::arg("seed") = 1, py::arg("mode") = "standard",
          "Run one seeded solve; bounds and the reference optimum come from the dense oracle.");
}
