#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "plurvec/classify.hpp"
#include "plurvec/error.hpp"
#include "plurvec/fracss.hpp"
#include "plurvec/knn.hpp"
#include "plurvec/pipeline.hpp"
#include "plurvec/stats.hpp"
#include "plurvec/synth.hpp"
#include "plurvec/vecspace.hpp"

namespace py = pybind11;
using namespace plurvec;

namespace {

py::dict test_dict(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["method"] = std::string(method_name(r.method));
    d["n"] = r.n;
    d["two_sided"] = r.sidedness == Sidedness::two;
    d["dropped_zeros"] = r.dropped_zeros;
    return d;
}

Metric metric_arg(const std::string& name) { return parse_metric(name); }

} // namespace

PYBIND11_MODULE(_plurvec, m) {
    m.doc() = "Vector-space models of English noun pluralization";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());

    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def(py::init([](std::vector<std::string> words, const Matrix& rows) {
                 return EmbeddingTable(std::move(words), rows.transpose());
             }),
             py::arg("words"), py::arg("vectors"), "Build from words and an n x dim array.")
        .def_property_readonly("dim", &EmbeddingTable::dim)
        .def("__len__", &EmbeddingTable::size)
        .def_property_readonly("words", &EmbeddingTable::words)
        .def("__contains__", [](const EmbeddingTable& t, const std::string& w) { return t.lookup(w).has_value(); })
        .def("vector", [](const EmbeddingTable& t, const std::string& w) -> Vector { return t.vector(t.require(w)); })
        .def("matrix", [](const EmbeddingTable& t) -> Matrix { return t.vectors().transpose(); },
             "All vectors as an n x dim array.")
        .def("normalized", &EmbeddingTable::normalized);

    m.def("load_embeddings", [](const std::filesystem::path& p) { return load_embeddings(p); }, py::arg("path"));

    m.def(
        "top_k",
        [](const EmbeddingTable& table, const Vector& query, std::size_t k, const std::string& metric) {
            const auto list = top_k(query, table, k, metric_arg(metric));
            std::vector<std::pair<std::string, double>> out;
            for (const auto& e : list.entries) out.emplace_back(table.word(e.id), e.score);
            return out;
        },
        py::arg("table"), py::arg("query"), py::arg("k"), py::arg("metric") = "cosine");

    py::class_<LinearMap>(m, "LinearMap")
        .def_readonly("matrix", &LinearMap::matrix)
        .def_readonly("ridge", &LinearMap::ridge)
        .def_readonly("rank", &LinearMap::rank)
        .def_readonly("residual", &LinearMap::residual)
        .def("save", [](const LinearMap& map, const std::filesystem::path& p) { save_linear_map(p, map); })
        .def_static("load", [](const std::filesystem::path& p) { return load_linear_map(p); });

    m.def("fit_linear_map", &fit_linear_map, py::arg("x"), py::arg("y"), py::arg("ridge") = 0.0,
          py::arg("rank_tolerance") = py::none(), "Least-squares B with X B ~ Y (rows are samples).");
    m.def("apply_map", &apply_map_rows, py::arg("map"), py::arg("rows"));
    m.def(
        "diagonal_profile",
        [](const LinearMap& map) {
            const auto p = diagonal_profile(map);
            py::dict d;
            d["diag_mean"] = p.diag_mean;
            d["diag_sd"] = p.diag_sd;
            d["offdiag_mean"] = p.offdiag_mean;
            d["offdiag_sd"] = p.offdiag_sd;
            return d;
        },
        py::arg("map"));

    m.def(
        "wilcoxon",
        [](const std::vector<double>& diffs, const std::string& alternative) {
            return test_dict(wilcoxon_signed_rank(diffs, parse_alternative(alternative)));
        },
        py::arg("differences"), py::arg("alternative") = "two-sided");
    m.def(
        "friedman", [](const std::vector<std::vector<double>>& groups) { return test_dict(friedman(groups)); },
        py::arg("groups"), "groups[j][i] is subject i under treatment j.");

    m.def(
        "gen_synth",
        [](std::size_t classes, std::size_t lexemes, std::size_t dim, std::uint64_t seed, double spread,
           double shared_shift) {
            SynthSpec spec;
            spec.classes = classes;
            spec.lexemes_per_class = lexemes;
            spec.dim = dim;
            spec.seed = seed;
            spec.lexeme_spread = spread;
            spec.shared_shift = shared_shift;
            auto data = gen_synth(spec);
            std::vector<std::tuple<std::string, std::string, std::string>> pairs;
            for (const auto& p : data.pairs) pairs.emplace_back(p.singular, p.plural, p.label.value_or(""));
            return py::make_tuple(std::move(data.table), pairs);
        },
        py::arg("classes") = 20, py::arg("lexemes") = 50, py::arg("dim") = 50, py::arg("seed") = 1,
        py::arg("spread") = 0.5, py::arg("shared_shift") = 0.0,
        "Returns (EmbeddingTable, [(singular, plural, class)]).");

    m.def(
        "analogy_topn",
        [](const EmbeddingTable& table, const std::vector<std::tuple<std::string, std::string, std::string>>& pairs,
           const std::string& metric, std::vector<std::size_t> ns, bool filter_singulars, std::size_t min_class_size) {
            std::vector<WordPair> wp;
            for (const auto& [sg, pl, label] : pairs) {
                wp.push_back({sg, pl, label.empty() ? std::nullopt : std::optional<std::string>(label)});
            }
            const auto bound = bind_pairs(wp, table);
            RunConfig config;
            config.metric = metric_arg(metric);
            config.ns = std::move(ns);
            config.filter_singulars = filter_singulars;
            config.min_class_size = min_class_size;
            const auto report = pipeline_analogy(table, bound.set, config);
            py::dict out;
            for (const auto& row : report.rows) {
                py::dict r;
                for (std::size_t i = 0; i < report.ns.size(); ++i) r[py::int_(report.ns[i])] = row.report.percent[i];
                out[py::str(std::string(method_label(row.method)))] = r;
            }
            return out;
        },
        py::arg("table"), py::arg("pairs"), py::arg("metric") = "cosine",
        py::arg("ns") = std::vector<std::size_t>{2, 3, 10, 20}, py::arg("filter_singulars") = false,
        py::arg("min_class_size") = 5, "Top-n percentages per method.");

    m.def(
        "lda_cv",
        [](const Matrix& rows, const std::vector<std::string>& labels, std::size_t folds, std::uint64_t seed,
           double shrinkage) {
            CvSpec spec;
            spec.k = folds;
            spec.seed = seed;
            const auto cv = stratified_cv(rows, labels, spec, shrinkage);
            py::dict d;
            d["test_accuracy"] = cv.test_accuracy.mean;
            d["test_f"] = cv.test_f.mean;
            d["baseline_test_f"] = cv.baseline_test_f.mean;
            d["test_ratio"] = cv.test_ratio.mean;
            return d;
        },
        py::arg("vectors"), py::arg("labels"), py::arg("folds") = 5, py::arg("seed") = 0,
        py::arg("shrinkage") = 1e-3);
}
