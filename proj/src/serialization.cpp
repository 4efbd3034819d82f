#include "scenclust/serialization.hpp"

#include "scenclust/error.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace scenclust {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

/// JSON has no NaN/Inf; they become null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const DistanceSpec& spec) {
    Json j{{"kind", std::string(to_string(spec.kind))}};
    if (spec.kind == DistanceKind::mlpc) {
        j["k_max"] = spec.k_max;
        j["zero_padded"] = spec.mlpc_zero_padded;
    }
    if (spec.kind == DistanceKind::dtw || spec.kind == DistanceKind::dtw_banded) {
        j["cost"] = std::string(to_string(spec.cost));
    }
    if (spec.kind == DistanceKind::dtw_banded) j["band"] = spec.band ? Json(*spec.band) : Json(nullptr);
    return j;
}

DistanceSpec distance_spec_from_json(const Json& j) {
    DistanceSpec spec;
    spec.kind = distance_kind_from_string(j.at("kind").get<std::string>());
    spec.k_max = get_or<std::size_t>(j, "k_max", spec.k_max);
    spec.mlpc_zero_padded = get_or<bool>(j, "zero_padded", false);
    if (j.contains("cost")) spec.cost = j.at("cost").get<std::string>() == "absolute" ? DtwCost::absolute : DtwCost::squared;
    if (j.contains("band") && !j.at("band").is_null()) spec.band = j.at("band").get<std::size_t>();
    return spec;
}

Json to_json(const RepresentationSpec& spec) {
    Json j{{"kind", std::string(to_string(spec.kind))}, {"label", spec.label()}};
    if (spec.kind == RepresentationKind::haar_level) j["level"] = spec.haar_level;
    if (spec.kind == RepresentationKind::haar_energy || spec.kind == RepresentationKind::fourier_energy ||
        spec.kind == RepresentationKind::pca) {
        j["alpha"] = spec.alpha;
    }
    return j;
}

RepresentationSpec representation_spec_from_json(const Json& j) {
    RepresentationSpec spec;
    spec.kind = representation_kind_from_string(j.at("kind").get<std::string>());
    spec.haar_level = get_or<std::size_t>(j, "level", spec.haar_level);
    spec.alpha = get_or<double>(j, "alpha", spec.alpha);
    return spec;
}

Json to_json(const SyntheticSpec& spec) {
    return {{"n_locations", spec.n_locations},
            {"n_scenarios", spec.n_scenarios},
            {"length", spec.length},
            {"location_mean_spread", spec.location_mean_spread},
            {"scenario_shape_amplitude", spec.scenario_shape_amplitude},
            {"noise_std", spec.noise_std},
            {"rng_seed", spec.rng_seed},
            {"n_shape_groups", spec.n_shape_groups},
            {"max_shape_lag", spec.max_shape_lag},
            {"diurnal_weight", spec.diurnal_weight},
            {"diurnal_period", spec.diurnal_period}};
}

Json to_json(const PipelineSpec& spec) {
    return {{"name", spec.name},
            {"representation", to_json(spec.representation)},
            {"distance", to_json(spec.distance)},
            {"reference", to_json(spec.reference)},
            {"k", spec.k},
            {"n_runs", spec.n_runs},
            {"seed", spec.seed},
            {"init", std::string(to_string(spec.init))},
            {"perplexity", spec.perplexity ? Json(*spec.perplexity) : Json(nullptr)},
            {"representative_k_max", spec.representative_k_max}};
}

Json to_json(const ClusteringResult& r) {
    return {{"labels", r.labels},
            {"medoids", r.medoids},
            {"objective", r.objective},
            {"seed", r.seed},
            {"n_iterations", r.n_iterations},
            {"objective_history", r.objective_history}};
}

ClusteringResult clustering_result_from_json(const Json& j) {
    ClusteringResult r;
    r.labels = j.at("labels").get<std::vector<int>>();
    r.medoids = j.at("medoids").get<std::vector<std::size_t>>();
    r.objective = j.at("objective").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_iterations = j.at("n_iterations").get<int>();
    r.objective_history = get_or<std::vector<double>>(j, "objective_history", {});
    return r;
}

Json to_json(const IndexReport& r) {
    return {{"pipeline", r.pipeline},
            {"representation", to_json(r.representation)},
            {"feature_dimension", r.feature_dimension},
            {"feature_distance", to_json(r.feature_distance)},
            {"reference_distance", to_json(r.reference_distance)},
            {"k", r.k},
            {"n_runs", r.n_runs},
            {"seed", r.seed},
            {"run_seeds", r.run_seeds},
            {"init", std::string(to_string(r.init))},
            {"perplexity", r.perplexity},
            {"W", r.within},
            {"W_mean_runs", r.within_mean_runs},
            {"D_JS", r.divergence},
            {"F", r.fidelity},
            {"I", r.index},
            {"consensus", r.consensus},
            {"best_run", r.best_run},
            {"best_objective", r.best_objective}};
}

IndexReport index_report_from_json(const Json& j) {
    IndexReport r;
    r.pipeline = j.at("pipeline").get<std::string>();
    r.representation = representation_spec_from_json(j.at("representation"));
    r.feature_dimension = j.at("feature_dimension").get<std::size_t>();
    r.feature_distance = distance_spec_from_json(j.at("feature_distance"));
    r.reference_distance = distance_spec_from_json(j.at("reference_distance"));
    r.k = j.at("k").get<std::size_t>();
    r.n_runs = j.at("n_runs").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.run_seeds = j.at("run_seeds").get<std::vector<std::uint64_t>>();
    r.init = kmedoids_init_from_string(j.at("init").get<std::string>());
    r.perplexity = j.at("perplexity").get<double>();
    r.within = j.at("W").get<double>();
    r.within_mean_runs = j.at("W_mean_runs").get<double>();
    r.divergence = j.at("D_JS").get<double>();
    r.fidelity = j.at("F").get<double>();
    r.index = j.at("I").get<double>();
    r.consensus = j.at("consensus").get<double>();
    r.best_run = j.at("best_run").get<std::size_t>();
    r.best_objective = j.at("best_objective").get<double>();
    return r;
}

Json to_json(const GroupComparisonReport& report) {
    Json methods = Json::array();
    for (const auto& m : report.methods) {
        methods.push_back({{"name", m.name},
                           {"distance", m.distance},
                           {"mean_a", m.mean_a},
                           {"mean_b", m.mean_b},
                           {"ratio_b_over_a", finite_or_null(m.ratio_b_over_a)},
                           {"overlap", m.overlap},
                           {"distances_a", m.distances_a},
                           {"distances_b", m.distances_b},
                           {"histogram",
                            {{"edges", m.histogram.edges},
                             {"count_a", m.histogram.count_a},
                             {"count_b", m.histogram.count_b}}}});
    }
    return {{"reference", {{"scenario", report.reference_scenario},
                           {"location", report.reference_location},
                           {"index", report.reference_index}}},
            {"seed", report.seed},
            {"group_a", report.group_a},
            {"group_b", report.group_b},
            {"methods", methods}};
}

Json to_json(const PipelineOutcome& outcome) {
    Json j{{"pipeline", to_json(outcome.spec)}};
    if (outcome.report) j["report"] = to_json(*outcome.report);
    if (outcome.error_code) {
        j["error"] = {{"code", std::string(to_string(*outcome.error_code))}, {"message", outcome.error}};
    }
    return j;
}

Json representation_sidecar(const Representation& rep) {
    Json params = Json::object();
    for (const auto& [k, v] : rep.params) params[k] = v;
    Json j{{"kind", std::string(to_string(rep.kind))},
           {"params", params},
           {"n_records", rep.features.rows()},
           {"dimension", rep.dimension()},
           {"series_length", rep.series_length},
           {"transform_length", rep.transform_length},
           {"kept_positions", rep.kept_positions}};
    if (!rep.eigenvalues.empty()) j["eigenvalues"] = rep.eigenvalues;
    return j;
}

std::string representation_csv(const Representation& rep) {
    std::string out = "record_index";
    for (std::size_t c = 0; c < rep.dimension(); ++c) out += fmt::format(",f{}", c);
    out += '\n';
    for (Eigen::Index i = 0; i < rep.features.rows(); ++i) {
        out += std::to_string(i);
        for (Eigen::Index c = 0; c < rep.features.cols(); ++c) {
            out += ',';
            out += num(rep.features(i, c));
        }
        out += '\n';
    }
    return out;
}

std::string representatives_csv(const std::vector<Representative>& reps) {
    std::string out = "cluster_id,t,value\n";
    for (const auto& r : reps) {
        for (std::size_t t = 0; t < r.series.size(); ++t) {
            out += fmt::format("{},{},{}\n", r.cluster_id, r.support_begin + t, num(r.series[t]));
        }
    }
    return out;
}

Json representative_lags(const std::vector<Representative>& reps) {
    Json arr = Json::array();
    for (const auto& r : reps) {
        arr.push_back({{"cluster_id", r.cluster_id},
                       {"members", r.members},
                       {"lags", r.member_lags},
                       {"support_begin", r.support_begin},
                       {"support_length", r.series.size()},
                       {"n_iterations", r.n_iterations}});
    }
    return arr;
}

std::string cluster_plot_csv(const Matrix& series, const Representative& rep) {
    std::string out = "kind,record,t,value\n";
    for (std::size_t m = 0; m < rep.members.size(); ++m) {
        const auto row = series.row(static_cast<Eigen::Index>(rep.members[m]));
        for (std::size_t t = 0; t < rep.series.size(); ++t) {
            const auto src = static_cast<Eigen::Index>(rep.support_begin + t) + rep.member_lags[m];
            out += fmt::format("member,{},{},{}\n", rep.members[m], rep.support_begin + t, num(row(src)));
        }
    }
    for (std::size_t t = 0; t < rep.series.size(); ++t) {
        out += fmt::format("representative,-1,{},{}\n", rep.support_begin + t, num(rep.series[t]));
    }
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_left,count_A,count_B\n";
    for (std::size_t b = 0; b < h.count_a.size(); ++b) {
        out += fmt::format("{},{},{}\n", num(h.edges[b]), h.count_a[b], h.count_b[b]);
    }
    return out;
}

std::string ranking_csv(const std::vector<IndexReport>& ranked) {
    std::string out = "rank,pipeline,I,F,W,D_JS,consensus,p\n";
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        const auto& x = ranked[r];
        out += fmt::format("{},{},{},{},{},{},{},{}\n", r + 1, x.pipeline, num(x.index), num(x.fidelity),
                           num(x.within), num(x.divergence), num(x.consensus), x.feature_dimension);
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), Errc::io, fmt::format("cannot write '{}'", path.string()));
    out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::io, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

Json read_json_file(const std::filesystem::path& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
        fail(Errc::parse, fmt::format("'{}': {}", path.string(), e.what()));
    }
}

}  // namespace scenclust
