// scenclust command-line front end.
//
//   scenclust generate          write a synthetic dataset
//   scenclust group-experiment  same-location vs same-scenario distance distributions
//   scenclust compare           score representation/distance pipelines
//   scenclust cluster           cluster report with lag-aligned representatives
//   scenclust report            re-rank the reports of a compare run
//
// Every verb reads an optional flat `key = value` config file; flags win
// over the file, which wins over the built-in defaults. Outputs go under
// --out together with a manifest.json holding the resolved configuration.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numeric or data error.

#include "scenclust/clustering.hpp"
#include "scenclust/dataset.hpp"
#include "scenclust/distances.hpp"
#include "scenclust/error.hpp"
#include "scenclust/evaluation.hpp"
#include "scenclust/experiments.hpp"
#include "scenclust/serialization.hpp"
#include "scenclust/transforms.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace scenclust;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// ---------------------------------------------------------------------------
// Settings: defaults < config file < flags

struct Key {
    const char* name;
    const char* help;
};

// Every key any verb understands. A config file may carry keys for other
// verbs; keys outside this list are rejected.
const std::vector<Key> kKeys{
    {"input", "input CSV (synthetic data is generated when absent)"},
    {"layout", "CSV layout: wide or long"},
    {"threads", "worker threads (0 = all cores)"},
    {"n_locations", "synthetic: number of locations"},
    {"n_scenarios", "synthetic: number of scenarios"},
    {"length", "synthetic: series length T"},
    {"location_mean_spread", "synthetic: std of per-location means"},
    {"scenario_shape_amplitude", "synthetic: amplitude of scenario shapes"},
    {"noise_std", "synthetic: white-noise std"},
    {"data_seed", "synthetic: generator seed"},
    {"n_shape_groups", "synthetic: planted shape groups (0 = one shape per scenario)"},
    {"max_shape_lag", "synthetic: maximum planted lag within a group"},
    {"diurnal_weight", "synthetic: share of shape variance in the daily cycle"},
    {"diurnal_period", "synthetic: daily cycle period in samples"},
    {"scenario", "reference scenario id"},
    {"location", "reference location id"},
    {"methods", "comma list of L2,Haar95,MLPC,DTW,Mean"},
    {"k_max", "MLPC maximum lag in samples"},
    {"band", "Sakoe-Chiba half-width for banded DTW (auto = ceil(0.1 T))"},
    {"seed", "seed for K-Medoids restarts and subsampling"},
    {"reference", "comma list of reference distances: l2, mlpc, dtw"},
    {"pipelines", "comma list of mean,L2,Fourier95,Haar95,PCA95,MLPC,DTW"},
    {"pipeline", "pipeline to cluster with"},
    {"k", "number of clusters"},
    {"runs", "K-Medoids restarts"},
    {"perplexity", "affinity perplexity (auto = min(30, (N-1)/3))"},
    {"init", "K-Medoids initialization: plus_plus or uniform"},
    {"alpha", "energy / variance threshold of reduced pipelines"},
    {"from", "directory of a previous compare run"},
};

using Settings = std::map<std::string, std::string>;

std::string dashed(std::string s) {
    for (char& ch : s) ch = ch == '_' ? '-' : ch;
    return s;
}

[[noreturn]] void config_error(const std::string& msg) { fail(Errc::config, msg); }

template <typename T>
T parse_number(const Settings& s, const std::string& key) {
    const auto it = s.find(key);
    if (it == s.end()) config_error(fmt::format("missing setting '{}'", key));
    T value{};
    const auto& text = it->second;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        config_error(fmt::format("setting '{}': cannot parse '{}'", key, text));
    }
    return value;
}

std::optional<std::size_t> parse_auto(const Settings& s, const std::string& key) {
    if (s.at(key) == "auto") return std::nullopt;
    return parse_number<std::size_t>(s, key);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    return out;
}

struct Verb {
    CLI::App* app = nullptr;
    Settings defaults;
    std::map<std::string, std::string> flags;  // key -> value given on the command line
    std::string config_path;
    std::string out;
    bool small = false;
};

void add_keys(Verb& v, const std::vector<std::string>& keys) {
    for (const auto& key : keys) {
        const Key* info = nullptr;
        for (const auto& k : kKeys)
            if (key == k.name) info = &k;
        const std::string names = "--" + dashed(key) + (key.find('_') != std::string::npos ? ",--" + key : "");
        v.app->add_option_function<std::string>(
                 names, [&v, key](const std::string& value) { v.flags[key] = value; },
                 fmt::format("{} (default: {})", info ? info->help : key, v.defaults.at(key)));
    }
}

void add_common(Verb& v, bool with_data) {
    v.app->add_option("--config", v.config_path, "flat key = value config file");
    v.app->add_option("--out", v.out, "output directory")->required();
    if (with_data) v.app->add_flag("--small", v.small, "small profile: 60 records of length 512");
}

Settings resolve(const Verb& v) {
    Settings s = v.defaults;
    if (v.small) {
        // The small profile rescales the synthetic data; explicit settings still win.
        if (s.count("n_shape_groups") && s.at("n_shape_groups") != "0") {
            s["n_locations"] = "1";
            s["n_scenarios"] = "60";
            s["n_shape_groups"] = "5";
        } else {
            s["n_locations"] = "6";
            s["n_scenarios"] = "10";
        }
        s["length"] = "512";
        if (s.count("k")) s["k"] = "5";
        if (s.count("k_max")) s["k_max"] = "48";
    }
    if (!v.config_path.empty()) {
        for (const auto& [key, value] : read_key_values(v.config_path)) {
            bool known = false;
            for (const auto& k : kKeys) known = known || key == k.name;
            if (!known) config_error(fmt::format("config '{}': unknown key '{}'", v.config_path, key));
            if (s.count(key)) s[key] = value;
        }
    }
    for (const auto& [key, value] : v.flags) s[key] = value;
    return s;
}

// ---------------------------------------------------------------------------
// Shared pieces

Settings data_defaults() {
    const SyntheticSpec d;
    return {{"input", ""},
            {"layout", "wide"},
            {"threads", "0"},
            {"n_locations", std::to_string(d.n_locations)},
            {"n_scenarios", std::to_string(d.n_scenarios)},
            {"length", std::to_string(d.length)},
            {"location_mean_spread", fmt::format("{}", d.location_mean_spread)},
            {"scenario_shape_amplitude", fmt::format("{}", d.scenario_shape_amplitude)},
            {"noise_std", fmt::format("{}", d.noise_std)},
            {"data_seed", std::to_string(d.rng_seed)},
            {"n_shape_groups", std::to_string(d.n_shape_groups)},
            {"max_shape_lag", std::to_string(d.max_shape_lag)},
            {"diurnal_weight", fmt::format("{}", d.diurnal_weight)},
            {"diurnal_period", std::to_string(d.diurnal_period)}};
}

/// Pipeline-comparison datasets: 200 scenarios at one location, 15 planted shapes.
Settings clustering_data_defaults() {
    auto s = data_defaults();
    s["n_locations"] = "1";
    s["n_scenarios"] = "200";
    s["length"] = "2160";
    s["n_shape_groups"] = "15";
    s["max_shape_lag"] = "24";
    return s;
}

std::vector<std::string> keys_of(const Settings& s) {
    std::vector<std::string> out;
    for (const auto& [k, v] : s) out.push_back(k);
    return out;
}

SyntheticSpec synthetic_spec(const Settings& s) {
    SyntheticSpec spec;
    spec.n_locations = parse_number<std::size_t>(s, "n_locations");
    spec.n_scenarios = parse_number<std::size_t>(s, "n_scenarios");
    spec.length = parse_number<std::size_t>(s, "length");
    spec.location_mean_spread = parse_number<double>(s, "location_mean_spread");
    spec.scenario_shape_amplitude = parse_number<double>(s, "scenario_shape_amplitude");
    spec.noise_std = parse_number<double>(s, "noise_std");
    spec.rng_seed = parse_number<std::uint64_t>(s, "data_seed");
    spec.n_shape_groups = parse_number<std::size_t>(s, "n_shape_groups");
    spec.max_shape_lag = parse_number<std::size_t>(s, "max_shape_lag");
    spec.diurnal_weight = parse_number<double>(s, "diurnal_weight");
    spec.diurnal_period = parse_number<std::size_t>(s, "diurnal_period");
    try {
        spec.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    return spec;
}

CsvLayout layout_of(const Settings& s) {
    const auto& l = s.at("layout");
    if (l == "wide") return CsvLayout::wide;
    if (l == "long") return CsvLayout::long_;
    config_error(fmt::format("layout must be 'wide' or 'long', got '{}'", l));
}

struct LoadedData {
    Dataset dataset;
    std::optional<SyntheticData> truth;
};

LoadedData load_data(const Settings& s) {
    if (!s.at("input").empty()) return {load_csv(s.at("input"), layout_of(s)), std::nullopt};
    auto truth = generate_synthetic_with_truth(synthetic_spec(s));
    return {truth.dataset, truth};
}

Parallelism parallelism(const Settings& s) { return {parse_number<int>(s, "threads")}; }

DistanceSpec reference_spec(const std::string& name, const Settings& s) {
    if (name == "l2") return {DistanceKind::l2};
    if (name == "mlpc") return {DistanceKind::mlpc, parse_number<std::size_t>(s, "k_max")};
    if (name == "dtw") {
        DistanceSpec d{DistanceKind::dtw_banded};
        d.band = parse_auto(s, "band");
        return d;
    }
    config_error(fmt::format("unknown reference distance '{}' (expected l2, mlpc or dtw)", name));
}

/// The named standard pipelines, with the configured threshold, k, restarts and init.
std::vector<PipelineSpec> select_pipelines(const Settings& s, const DistanceSpec& reference,
                                           const std::vector<std::string>& names, std::size_t n_records) {
    const auto k = parse_number<std::size_t>(s, "k");
    if (k < 1 || k > n_records) config_error(fmt::format("k must lie in [1, {}], got {}", n_records, k));
    if (parse_number<std::size_t>(s, "runs") < 1) config_error("runs must be at least 1");
    auto all = standard_pipelines(reference, parse_number<std::size_t>(s, "k"), parse_number<std::size_t>(s, "runs"),
                                  parse_number<std::uint64_t>(s, "seed"), parse_number<std::size_t>(s, "k_max"),
                                  parse_auto(s, "band"));
    const double alpha = parse_number<double>(s, "alpha");
    if (!(alpha > 0.0 && alpha <= 1.0)) config_error(fmt::format("alpha must lie in (0, 1], got {}", alpha));
    const auto init = kmedoids_init_from_string(s.at("init"));
    std::optional<double> perplexity;
    if (s.at("perplexity") != "auto") perplexity = parse_number<double>(s, "perplexity");
    std::vector<PipelineSpec> out;
    for (const auto& name : names) {
        bool found = false;
        for (auto p : all) {
            if (p.name != name) continue;
            found = true;
            if (p.representation.kind != RepresentationKind::mean && p.representation.kind != RepresentationKind::identity) {
                p.representation.alpha = alpha;
            }
            p.init = init;
            p.perplexity = perplexity;
            out.push_back(p);
        }
        if (!found) config_error(fmt::format("unknown pipeline '{}'", name));
    }
    return out;
}

class Output {
public:
    explicit Output(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        require(!ec, Errc::io, fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
    }

    void text(const std::string& rel, const std::string& content) {
        const auto path = dir_ / rel;
        fs::create_directories(path.parent_path());
        write_text_file(path, content);
        files_.insert(rel);
    }
    void json(const std::string& rel, const Json& j) { text(rel, j.dump(2) + "\n"); }
    void distances(const std::string& rel, const DistanceMatrix& d) {
        const auto path = dir_ / rel;
        fs::create_directories(path.parent_path());
        write_distance_binary(d, path);
        files_.insert(rel);
    }
    void csv(const std::string& rel, const Dataset& ds, CsvLayout layout) {
        const auto path = dir_ / rel;
        write_csv(ds, path, layout);
        files_.insert(rel);
    }

    void manifest(const std::string& command, const Settings& s, Json seeds, Json extra = Json::object()) {
        Json config = Json::object();
        for (const auto& [k, v] : s) config[k] = v;
        Json j{{"tool", "scenclust"},
               {"version", SCENCLUST_VERSION},
               {"command", command},
               {"config", config},
               {"seeds", std::move(seeds)},
               {"outputs", std::vector<std::string>(files_.begin(), files_.end())}};
        for (auto& [k, v] : extra.items()) j[k] = v;
        write_text_file(dir_ / "manifest.json", j.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::set<std::string> files_;
};

Json data_seeds(const Settings& s) {
    Json j = Json::object();
    if (s.at("input").empty()) j["data_seed"] = parse_number<std::uint64_t>(s, "data_seed");
    return j;
}

Json data_source(const Settings& s, const Dataset& ds) {
    Json j{{"n_records", ds.size()}, {"length", ds.length()}};
    if (s.at("input").empty()) j["synthetic"] = to_json(synthetic_spec(s));
    else j["input"] = s.at("input");
    return j;
}

std::string safe_name(const std::string& label) {
    std::string out;
    for (char ch : label) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-') ? ch : '_';
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

// ---------------------------------------------------------------------------
// Verbs

int run_generate(const Verb& v) {
    const auto s = resolve(v);
    const auto data = load_data(s);
    Output out(v.out);
    out.csv("data.csv", data.dataset, layout_of(s));
    if (data.truth) {
        out.json("truth.json", {{"location_means", data.truth->location_means},
                                {"shape_group", data.truth->shape_group},
                                {"shape_lag", data.truth->shape_lag}});
    }
    out.manifest("generate", s, data_seeds(s), {{"data", data_source(s, data.dataset)}});
    fmt::print("wrote {} records of length {} to {}\n", data.dataset.size(), data.dataset.length(),
               (fs::path(v.out) / "data.csv").string());
    return 0;
}

int run_group_experiment(const Verb& v) {
    const auto s = resolve(v);
    const auto data = load_data(s);
    const auto par = parallelism(s);
    const auto k_max = parse_number<std::size_t>(s, "k_max");
    const auto band = parse_auto(s, "band");
    std::vector<GroupMethod> methods;
    for (const auto& name : split_list(s.at("methods"))) {
        bool found = false;
        for (const auto& m : standard_group_methods(k_max, band)) {
            if (m.name == name) {
                methods.push_back(m);
                found = true;
            }
        }
        if (!found) config_error(fmt::format("unknown method '{}'", name));
    }
    const auto seed = parse_number<std::uint64_t>(s, "seed");
    const auto report = group_experiment(data.dataset, parse_number<std::int64_t>(s, "scenario"),
                                         parse_number<std::int64_t>(s, "location"), methods, seed, par);
    Output out(v.out);
    out.json("group_report.json", to_json(report));
    fmt::print("{:<8} {:>12} {:>12} {:>10} {:>8}\n", "method", "mean A", "mean B", "B/A", "overlap");
    for (const auto& m : report.methods) {
        out.text(fmt::format("histogram_{}.csv", m.name), histogram_csv(m.histogram));
        fmt::print("{:<8} {:>12.5g} {:>12.5g} {:>10.4g} {:>8.3f}\n", m.name, m.mean_a, m.mean_b, m.ratio_b_over_a, m.overlap);
    }
    auto seeds = data_seeds(s);
    seeds["subsample_seed"] = seed;
    out.manifest("group-experiment", s, seeds, {{"data", data_source(s, data.dataset)}});
    return 0;
}

int run_compare(const Verb& v) {
    const auto s = resolve(v);
    const auto data = load_data(s);
    const auto par = parallelism(s);
    const auto names = split_list(s.at("pipelines"));
    Output out(v.out);

    Json all = Json::array();
    Json run_seeds = Json::object();
    bool any_failed = false;
    std::vector<IndexReport> reports;
    for (const auto& ref_name : split_list(s.at("reference"))) {
        const auto reference = reference_spec(ref_name, s);
        const auto pipes = select_pipelines(s, reference, names, data.dataset.size());
        const auto ref_dist = reference_distances(data.dataset, reference, par);
        const std::string ref_dir = fmt::format("reference_{}", ref_name);
        out.distances(ref_dir + "/reference_distances.bin", ref_dist);
        for (const auto& spec : pipes) {
            PipelineOutcome outcome{spec, std::nullopt, std::nullopt, {}};
            const std::string dir = fmt::format("{}/{}", ref_dir, safe_name(spec.name));
            try {
                const auto run = run_pipeline(data.dataset, spec, par);
                outcome.report = score_pipeline(spec, run, ref_dist, par);
                out.json(dir + "/report.json", to_json(*outcome.report));
                out.json(dir + "/clustering.json", to_json(run.clustering.best));
                Json runs = Json::array();
                for (const auto& r : run.clustering.runs) runs.push_back(to_json(r));
                out.json(dir + "/runs.json", runs);
                out.json(dir + "/representation.json", representation_sidecar(run.representation));
                out.text(dir + "/representation.csv", representation_csv(run.representation));
                out.distances(dir + "/feature_distances.bin", run.features);
                reports.push_back(*outcome.report);
                run_seeds[ref_name + "/" + spec.name] = outcome.report->run_seeds;
            } catch (const Error& e) {
                outcome.error_code = e.code();
                outcome.error = e.what();
                any_failed = true;
                std::fprintf(stderr, "pipeline %s (reference %s) failed: %s\n", spec.name.c_str(), ref_name.c_str(), e.what());
            }
            all.push_back(to_json(outcome));
        }
    }
    out.json("reports.json", all);
    for (const auto& [label, ranked] : rank_reports(reports)) {
        out.text(fmt::format("ranking_{}.csv", safe_name(label)), ranking_csv(ranked));
        fmt::print("reference {}\n{:>4} {:<10} {:>9} {:>9} {:>9} {:>9} {:>5}\n", label, "rank", "pipeline", "I", "F", "W",
                   "consensus", "p");
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            const auto& x = ranked[r];
            fmt::print("{:>4} {:<10} {:>9.4f} {:>9.4f} {:>9.4f} {:>9.4f} {:>5}\n", r + 1, x.pipeline, x.index, x.fidelity,
                       x.within, x.consensus, x.feature_dimension);
        }
    }
    auto seeds = data_seeds(s);
    seeds["seed"] = parse_number<std::uint64_t>(s, "seed");
    seeds["run_seeds"] = run_seeds;
    out.manifest("compare", s, seeds, {{"data", data_source(s, data.dataset)}});
    return any_failed ? kExitNumeric : 0;
}

int run_cluster(const Verb& v) {
    const auto s = resolve(v);
    const auto data = load_data(s);
    const auto par = parallelism(s);
    // The reference only matters for scoring; the cluster report scores against MLPC.
    const auto pipes = select_pipelines(s, reference_spec("mlpc", s), {s.at("pipeline")}, data.dataset.size());
    const auto report = cluster_report(data.dataset, pipes.front(), par);
    const auto& best = report.run.clustering.best;

    Output out(v.out);
    Json labels = to_json(best);
    labels["pipeline"] = to_json(pipes.front());
    Json record_ids = Json::array();
    for (const auto& info : data.dataset.infos()) record_ids.push_back({info.scenario_id, info.location_id});
    labels["records"] = record_ids;
    if (data.truth && !data.truth->shape_group.empty() && parse_number<std::size_t>(s, "n_shape_groups") > 0) {
        std::vector<int> planted;
        for (const auto& info : data.dataset.infos()) planted.push_back(data.truth->shape_group[static_cast<std::size_t>(info.scenario_id)]);
        labels["ari_vs_planted"] = adjusted_rand_index(best.labels, planted);
    }
    out.json("labels.json", labels);
    out.text("representatives.csv", representatives_csv(report.representatives));
    out.json("representative_lags.json", representative_lags(report.representatives));
    for (const auto& rep : report.representatives) {
        out.text(fmt::format("cluster_{:02d}.csv", rep.cluster_id), cluster_plot_csv(report.run.data.values(), rep));
    }
    fmt::print("k={} objective={:.6g} iterations={}", best.k(), best.objective, best.n_iterations);
    if (labels.contains("ari_vs_planted")) fmt::print(" ARI vs planted groups={:.4f}", labels["ari_vs_planted"].get<double>());
    fmt::print("\n");
    auto seeds = data_seeds(s);
    seeds["seed"] = parse_number<std::uint64_t>(s, "seed");
    std::vector<std::uint64_t> rs;
    for (const auto& r : report.run.clustering.runs) rs.push_back(r.seed);
    seeds["run_seeds"] = rs;
    out.manifest("cluster", s, seeds, {{"data", data_source(s, data.dataset)}});
    return 0;
}

int run_report(const Verb& v) {
    const auto s = resolve(v);
    const fs::path from = s.at("from");
    if (from.empty()) config_error("report needs --from <compare output directory>");
    const auto outcomes = read_json_file(from / "reports.json");
    std::vector<IndexReport> reports;
    Json failures = Json::array();
    for (const auto& o : outcomes) {
        if (o.contains("report")) reports.push_back(index_report_from_json(o.at("report")));
        else failures.push_back({{"pipeline", o.at("pipeline").at("name")}, {"error", o.at("error")}});
    }
    Output out(v.out);
    Json summary = Json::object();
    std::string md;
    for (const auto& [label, ranked] : rank_reports(reports)) {
        out.text(fmt::format("ranking_{}.csv", safe_name(label)), ranking_csv(ranked));
        Json list = Json::array();
        md += fmt::format("## Reference {}\n\n| rank | pipeline | I | F | W | D_JS | consensus | p |\n|---|---|---|---|---|---|---|---|\n", label);
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            const auto& x = ranked[r];
            list.push_back(to_json(x));
            md += fmt::format("| {} | {} | {:.4f} | {:.4f} | {:.4f} | {:.4f} | {:.4f} | {} |\n", r + 1, x.pipeline, x.index,
                              x.fidelity, x.within, x.divergence, x.consensus, x.feature_dimension);
        }
        md += "\n";
        summary[label] = list;
    }
    out.json("summary.json", {{"rankings", summary}, {"failures", failures}});
    out.text("summary.md", md);
    fmt::print("{}", md);
    out.manifest("report", s, Json::object(), {{"source", from.string()}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario time-series clustering and representation evaluation"};
    app.set_version_flag("--version", SCENCLUST_VERSION);
    app.require_subcommand(1);

    Verb generate, group, compare, cluster, report;

    generate.app = app.add_subcommand("generate", "write a synthetic scenario dataset");
    generate.defaults = data_defaults();
    add_common(generate, true);
    add_keys(generate, keys_of(generate.defaults));

    group.app = app.add_subcommand("group-experiment", "same-location vs same-scenario distance distributions");
    group.defaults = data_defaults();
    group.defaults.insert({{"scenario", "0"}, {"location", "0"}, {"methods", "L2,Haar95,MLPC,DTW,Mean"},
                           {"k_max", "240"}, {"band", "auto"}, {"seed", "7"}});
    add_common(group, true);
    add_keys(group, keys_of(group.defaults));

    const Settings clustering_keys{{"k", "15"}, {"runs", "5"}, {"seed", "1"}, {"k_max", "240"}, {"band", "auto"},
                                   {"perplexity", "auto"}, {"init", "plus_plus"}, {"alpha", "0.95"}};

    compare.app = app.add_subcommand("compare", "score representation/distance pipelines");
    compare.defaults = clustering_data_defaults();
    compare.defaults.insert(clustering_keys.begin(), clustering_keys.end());
    compare.defaults.insert({{"reference", "mlpc,l2"}, {"pipelines", "mean,L2,Fourier95,Haar95,PCA95,MLPC,DTW"}});
    add_common(compare, true);
    add_keys(compare, keys_of(compare.defaults));

    cluster.app = app.add_subcommand("cluster", "cluster report with lag-aligned representatives");
    cluster.defaults = clustering_data_defaults();
    cluster.defaults.insert(clustering_keys.begin(), clustering_keys.end());
    cluster.defaults.insert({{"pipeline", "MLPC"}});
    add_common(cluster, true);
    add_keys(cluster, keys_of(cluster.defaults));

    report.app = app.add_subcommand("report", "re-rank the index reports of a compare run");
    report.defaults = {{"from", ""}};
    add_common(report, false);
    add_keys(report, {"from"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (generate.app->parsed()) return run_generate(generate);
        if (group.app->parsed()) return run_group_experiment(group);
        if (compare.app->parsed()) return run_compare(compare);
        if (cluster.app->parsed()) return run_cluster(cluster);
        if (report.app->parsed()) return run_report(report);
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.code())).c_str(), e.what());
        return e.is_config_error() ? kExitConfig : kExitNumeric;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: malformed JSON input: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitConfig;
}
