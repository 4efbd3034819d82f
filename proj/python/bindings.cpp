// Python bindings. Arrays cross as NumPy float64; structured results cross
// as JSON text and are decoded by the pure-Python wrapper package.

#include "scenclust/clustering.hpp"
#include "scenclust/dataset.hpp"
#include "scenclust/distances.hpp"
#include "scenclust/error.hpp"
#include "scenclust/evaluation.hpp"
#include "scenclust/experiments.hpp"
#include "scenclust/serialization.hpp"
#include "scenclust/transforms.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fmt/format.h>

namespace py = pybind11;
using namespace scenclust;

namespace {

using Ids = std::vector<std::int64_t>;

Dataset make_dataset(const Matrix& values, const std::optional<Ids>& scenario_ids, const std::optional<Ids>& location_ids) {
    const auto n = static_cast<std::size_t>(values.rows());
    require(!scenario_ids || scenario_ids->size() == n, Errc::invalid_argument, "scenario_ids must have one entry per row");
    require(!location_ids || location_ids->size() == n, Errc::invalid_argument, "location_ids must have one entry per row");
    std::vector<RecordInfo> info(n);
    for (std::size_t i = 0; i < n; ++i) {
        info[i].scenario_id = scenario_ids ? (*scenario_ids)[i] : static_cast<std::int64_t>(i);
        info[i].location_id = location_ids ? (*location_ids)[i] : 0;
    }
    return Dataset(std::move(info), values);
}

py::dict dataset_dict(const Dataset& ds) {
    Ids scen, loc;
    for (const auto& info : ds.infos()) {
        scen.push_back(info.scenario_id);
        loc.push_back(info.location_id);
    }
    py::dict d;
    d["values"] = ds.values();
    d["scenario_ids"] = scen;
    d["location_ids"] = loc;
    return d;
}

DistanceSpec distance_spec(const std::string& kind, std::size_t k_max, std::optional<std::size_t> band) {
    DistanceSpec spec{distance_kind_from_string(kind)};
    spec.k_max = k_max;
    spec.band = band;
    return spec;
}

PipelineSpec pipeline_by_name(const std::string& name, const std::string& reference, std::size_t k, std::size_t runs,
                              std::uint64_t seed, std::size_t k_max, std::optional<std::size_t> band, double alpha,
                              const std::string& init, std::optional<double> perplexity) {
    for (auto p : standard_pipelines(distance_spec(reference, k_max, band), k, runs, seed, k_max, band)) {
        if (p.name != name) continue;
        if (p.representation.kind != RepresentationKind::mean && p.representation.kind != RepresentationKind::identity) {
            p.representation.alpha = alpha;
        }
        p.init = kmedoids_init_from_string(init);
        p.perplexity = perplexity;
        return p;
    }
    fail(Errc::invalid_argument, fmt::format("unknown pipeline '{}'", name));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Scenario time-series clustering core";
    m.attr("__version__") = SCENCLUST_VERSION;

    static py::exception<Error> error_type(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            auto cls = py::reinterpret_borrow<py::object>(error_type.ptr());
            py::object exc = cls(py::str(e.what()));
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    // Data
    m.def(
        "generate_synthetic",
        [](const std::string& config_json) {
            SyntheticSpec spec;
            std::map<std::string, std::string> kv;
            const auto config = Json::parse(config_json);
            for (const auto& [k, v] : config.items()) kv[k] = v.is_string() ? v.get<std::string>() : v.dump();
            apply_synthetic_config(spec, kv);
            const auto truth = generate_synthetic_with_truth(spec);
            auto d = dataset_dict(truth.dataset);
            d["shape_group"] = truth.shape_group;
            d["shape_lag"] = truth.shape_lag;
            d["location_means"] = truth.location_means;
            return d;
        },
        py::arg("config_json"));
    m.def(
        "load_csv",
        [](const std::filesystem::path& path, const std::string& layout) {
            require(layout == "wide" || layout == "long", Errc::invalid_argument, "layout must be 'wide' or 'long'");
            return dataset_dict(load_csv(path, layout == "wide" ? CsvLayout::wide : CsvLayout::long_));
        },
        py::arg("path"), py::arg("layout") = "wide");

    // Transforms
    m.def("haar_coefficients", [](const std::vector<double>& x) { return haar_coefficients(x); }, py::arg("x"));
    m.def(
        "transform",
        [](const Matrix& values, const std::string& kind, double alpha, std::size_t level, int threads) {
            RepresentationSpec spec{representation_kind_from_string(kind)};
            spec.alpha = alpha;
            spec.haar_level = level;
            const auto rep = make_representation(make_dataset(values, std::nullopt, std::nullopt), spec, {threads});
            return py::make_tuple(rep.features, representation_sidecar(rep).dump());
        },
        py::arg("values"), py::arg("kind"), py::arg("alpha") = 0.95, py::arg("level") = 4, py::arg("threads") = 0);

    // Distances
    m.def(
        "distance",
        [](const std::vector<double>& z, const std::vector<double>& w, const std::string& kind, std::size_t k_max,
           std::optional<std::size_t> band) { return distance(z, w, distance_spec(kind, k_max, band)); },
        py::arg("z"), py::arg("w"), py::arg("kind") = "l2", py::arg("k_max") = 240, py::arg("band") = py::none());
    m.def(
        "distance_matrix",
        [](const Matrix& values, const std::string& kind, std::size_t k_max, std::optional<std::size_t> band, int threads) {
            py::gil_scoped_release release;
            return distance_matrix(values, distance_spec(kind, k_max, band), {threads}).values;
        },
        py::arg("values"), py::arg("kind") = "l2", py::arg("k_max") = 240, py::arg("band") = py::none(),
        py::arg("threads") = 0);

    // Clustering
    m.def(
        "kmedoids",
        [](const Matrix& d, std::size_t k, std::uint64_t seed, const std::string& init) {
            return to_json(kmedoids(d, k, seed, kmedoids_init_from_string(init))).dump();
        },
        py::arg("d"), py::arg("k"), py::arg("seed") = 0, py::arg("init") = "plus_plus");
    m.def(
        "kmedoids_restarts",
        [](const Matrix& d, std::size_t k, std::size_t runs, std::uint64_t seed, const std::string& init, int threads) {
            const auto r = kmedoids_restarts(d, k, runs, seed, {threads}, kmedoids_init_from_string(init));
            Json j{{"best", to_json(r.best)}, {"best_run", r.best_run}, {"runs", Json::array()}};
            for (const auto& run : r.runs) j["runs"].push_back(to_json(run));
            return j.dump();
        },
        py::arg("d"), py::arg("k"), py::arg("runs") = 5, py::arg("seed") = 0, py::arg("init") = "plus_plus",
        py::arg("threads") = 0);

    // Evaluation
    m.def(
        "affinities", [](const Matrix& d, double perplexity) { return affinities(d, perplexity).joint; }, py::arg("d"),
        py::arg("perplexity"));
    m.def("default_perplexity", &default_perplexity, py::arg("n"));
    m.def(
        "fidelity",
        [](const Matrix& d_ref, const Matrix& d_feat, double perplexity) {
            const auto f = fidelity(d_ref, d_feat, perplexity);
            return py::make_tuple(f.fidelity, f.divergence);
        },
        py::arg("d_reference"), py::arg("d_features"), py::arg("perplexity"));
    m.def(
        "within_index",
        [](const Matrix& d, const std::vector<int>& labels, const std::vector<std::size_t>& medoids) {
            return within_index(d, labels, medoids);
        },
        py::arg("d"), py::arg("labels"), py::arg("medoids"));
    m.def("combined_index", &combined_index, py::arg("fidelity"), py::arg("within"));
    m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));
    m.def(
        "consensus_index", [](const std::vector<std::vector<int>>& l) { return consensus_index(l); },
        py::arg("labelings"));

    // Experiments
    m.def(
        "evaluate_pipeline",
        [](const Matrix& values, const std::optional<Ids>& scenario_ids, const std::optional<Ids>& location_ids,
           const std::string& pipeline, const std::string& reference, std::size_t k, std::size_t runs, std::uint64_t seed,
           std::size_t k_max, std::optional<std::size_t> band, double alpha, const std::string& init,
           std::optional<double> perplexity, int threads) {
            const auto spec = pipeline_by_name(pipeline, reference, k, runs, seed, k_max, band, alpha, init, perplexity);
            const auto ds = make_dataset(values, scenario_ids, location_ids);
            py::gil_scoped_release release;
            return to_json(evaluate_pipeline(ds, spec, {threads})).dump();
        },
        py::arg("values"), py::arg("scenario_ids") = py::none(), py::arg("location_ids") = py::none(),
        py::arg("pipeline") = "MLPC", py::arg("reference") = "mlpc", py::arg("k") = 15, py::arg("runs") = 5,
        py::arg("seed") = 0, py::arg("k_max") = 240, py::arg("band") = py::none(), py::arg("alpha") = 0.95,
        py::arg("init") = "plus_plus", py::arg("perplexity") = py::none(), py::arg("threads") = 0);
    m.def(
        "group_experiment",
        [](const Matrix& values, const Ids& scenario_ids, const Ids& location_ids, std::int64_t scenario,
           std::int64_t location, const std::vector<std::string>& methods, std::size_t k_max,
           std::optional<std::size_t> band, std::uint64_t seed, int threads) {
            std::vector<GroupMethod> selected;
            const auto all = standard_group_methods(k_max, band);
            for (const auto& name : methods) {
                const auto it = std::find_if(all.begin(), all.end(), [&](const GroupMethod& g) { return g.name == name; });
                require(it != all.end(), Errc::invalid_argument, fmt::format("unknown method '{}'", name));
                selected.push_back(*it);
            }
            const auto ds = make_dataset(values, scenario_ids, location_ids);
            py::gil_scoped_release release;
            return to_json(group_experiment(ds, scenario, location, selected, seed, {threads})).dump();
        },
        py::arg("values"), py::arg("scenario_ids"), py::arg("location_ids"), py::arg("scenario") = 0,
        py::arg("location") = 0,
        py::arg("methods") = std::vector<std::string>{"L2", "Haar95", "MLPC", "DTW", "Mean"}, py::arg("k_max") = 240,
        py::arg("band") = py::none(), py::arg("seed") = 7, py::arg("threads") = 0);
}
