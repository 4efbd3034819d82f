#include "scenclust/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace scenclust {

Preprocessing preprocessing_for(const DistanceSpec& distance) {
    return distance.kind == DistanceKind::l2 ? Preprocessing::global_centered : Preprocessing::zscored;
}

Dataset prepare(const Dataset& ds, Preprocessing target) {
    if (ds.preprocessing() == target) return ds;
    switch (target) {
        case Preprocessing::raw:
            fail(Errc::invalid_argument, "cannot undo preprocessing");
        case Preprocessing::global_centered:
            require(ds.preprocessing() == Preprocessing::raw, Errc::invalid_argument,
                    fmt::format("cannot center a '{}' dataset", to_string(ds.preprocessing())));
            return center_global(ds);
        case Preprocessing::zscored: return zscore(ds);
    }
    return ds;
}

std::vector<PipelineSpec> standard_pipelines(const DistanceSpec& reference, std::size_t k, std::size_t n_runs,
                                             std::uint64_t seed, std::size_t k_max, std::optional<std::size_t> band) {
    auto make = [&](std::string name, RepresentationKind kind, DistanceSpec distance) {
        PipelineSpec p;
        p.name = std::move(name);
        p.representation.kind = kind;
        p.representation.alpha = 0.95;
        p.distance = distance;
        p.reference = reference;
        p.k = k;
        p.n_runs = n_runs;
        p.seed = seed;
        p.representative_k_max = k_max;
        return p;
    };
    DistanceSpec l2{DistanceKind::l2};
    DistanceSpec mlpc{DistanceKind::mlpc};
    mlpc.k_max = k_max;
    DistanceSpec dtw{DistanceKind::dtw_banded};
    dtw.band = band;
    return {
        make("mean", RepresentationKind::mean, l2),
        make("L2", RepresentationKind::identity, l2),
        make("Fourier95", RepresentationKind::fourier_energy, l2),
        make("Haar95", RepresentationKind::haar_energy, l2),
        make("PCA95", RepresentationKind::pca, l2),
        make("MLPC", RepresentationKind::identity, mlpc),
        make("DTW", RepresentationKind::identity, dtw),
    };
}

PipelineRun run_pipeline(const Dataset& ds, const PipelineSpec& spec, Parallelism par) {
    auto data = prepare(ds, preprocessing_for(spec.distance));
    auto rep = make_representation(data, spec.representation, par);
    auto features = distance_matrix(rep.features, spec.distance, par);
    auto clustering = kmedoids_restarts(features, spec.k, spec.n_runs, spec.seed, par, spec.init);
    return {std::move(data), std::move(rep), std::move(features), std::move(clustering)};
}

DistanceMatrix reference_distances(const Dataset& ds, const DistanceSpec& reference, Parallelism par) {
    const auto data = prepare(ds, preprocessing_for(reference));
    return distance_matrix(data.values(), reference, par);
}

IndexReport score_pipeline(const PipelineSpec& spec, const PipelineRun& run, const DistanceMatrix& reference,
                           Parallelism par) {
    IndexReport r;
    r.pipeline = spec.name;
    r.representation = spec.representation;
    r.feature_dimension = run.representation.dimension();
    r.feature_distance = run.features.spec;
    r.reference_distance = reference.spec;
    r.k = spec.k;
    r.n_runs = spec.n_runs;
    r.seed = spec.seed;
    for (const auto& c : run.clustering.runs) r.run_seeds.push_back(c.seed);
    r.init = spec.init;
    r.perplexity = spec.perplexity.value_or(default_perplexity(run.features.size()));

    r.within = within_index(run.features, run.clustering.best);
    double sum = 0.0;
    for (const auto& c : run.clustering.runs) sum += within_index(run.features, c);
    r.within_mean_runs = sum / static_cast<double>(run.clustering.runs.size());

    const auto f = fidelity(reference, run.features, r.perplexity, par);
    r.fidelity = f.fidelity;
    r.divergence = f.divergence;
    r.index = combined_index(r.fidelity, r.within);
    r.consensus = run.clustering.runs.size() >= 2 ? consensus_index(run.clustering.runs) : 1.0;
    r.best_run = run.clustering.best_run;
    r.best_objective = run.clustering.best.objective;
    return r;
}

IndexReport evaluate_pipeline(const Dataset& ds, const PipelineSpec& spec, Parallelism par) {
    const auto run = run_pipeline(ds, spec, par);
    return score_pipeline(spec, run, reference_distances(ds, spec.reference, par), par);
}

std::vector<PipelineOutcome> compare_pipelines(const Dataset& ds, const std::vector<PipelineSpec>& pipelines,
                                               Parallelism par) {
    std::vector<PipelineOutcome> out;
    std::vector<std::pair<DistanceSpec, DistanceMatrix>> references;
    auto reference_for = [&](const DistanceSpec& spec) -> const DistanceMatrix& {
        for (const auto& [s, m] : references) {
            if (s == spec) return m;
        }
        references.emplace_back(spec, reference_distances(ds, spec, par));
        return references.back().second;
    };

    for (const auto& spec : pipelines) {
        PipelineOutcome outcome{spec, std::nullopt, std::nullopt, {}};
        try {
            const auto run = run_pipeline(ds, spec, par);
            outcome.report = score_pipeline(spec, run, reference_for(spec.reference), par);
        } catch (const Error& e) {
            outcome.error_code = e.code();
            outcome.error = e.what();
        }
        out.push_back(std::move(outcome));
    }
    return out;
}

std::map<std::string, std::vector<IndexReport>> rank_reports(const std::vector<IndexReport>& reports) {
    std::map<std::string, std::vector<IndexReport>> ranked;
    for (const auto& r : reports) ranked[r.reference_distance.label()].push_back(r);
    for (auto& [key, list] : ranked) {
        std::stable_sort(list.begin(), list.end(), [](const IndexReport& a, const IndexReport& b) {
            if (a.index != b.index) return a.index > b.index;
            return a.pipeline < b.pipeline;
        });
    }
    return ranked;
}

// ---------------------------------------------------------------------------
// Distance-significance experiment

std::vector<GroupMethod> standard_group_methods(std::size_t k_max, std::optional<std::size_t> band) {
    DistanceSpec l2{DistanceKind::l2};
    DistanceSpec mlpc{DistanceKind::mlpc};
    mlpc.k_max = k_max;
    DistanceSpec dtw{DistanceKind::dtw_banded};
    dtw.band = band;
    RepresentationSpec identity{RepresentationKind::identity};
    RepresentationSpec haar95{RepresentationKind::haar_energy, 4, 0.95};
    RepresentationSpec mean{RepresentationKind::mean};
    return {
        {"L2", identity, l2, Preprocessing::global_centered},
        {"Haar95", haar95, l2, Preprocessing::global_centered},
        {"MLPC", identity, mlpc, Preprocessing::zscored},
        {"DTW", identity, dtw, Preprocessing::zscored},
        {"Mean", mean, l2, Preprocessing::global_centered},
    };
}

Histogram make_histogram(const std::vector<double>& a, const std::vector<double>& b, std::size_t bins) {
    require(bins >= 1, Errc::invalid_argument, "histogram needs at least one bin");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* v : {&a, &b}) {
        for (double x : *v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    if (!(hi > lo)) {
        if (!std::isfinite(lo)) lo = 0.0;
        hi = lo + 1.0;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t e = 0; e <= bins; ++e) h.edges[e] = lo + (hi - lo) * static_cast<double>(e) / static_cast<double>(bins);
    h.edges.back() = hi;
    auto bin_of = [&](double x) {
        auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
        return std::min(idx, bins - 1);
    };
    h.count_a.assign(bins, 0);
    h.count_b.assign(bins, 0);
    for (double x : a) ++h.count_a[bin_of(x)];
    for (double x : b) ++h.count_b[bin_of(x)];
    return h;
}

namespace {

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<std::size_t> seeded_subsample(std::vector<std::size_t> items, std::size_t size, std::uint64_t seed) {
    if (items.size() <= size) return items;
    const auto picks = sample_without_replacement(items.size(), size, seed);
    std::vector<std::size_t> out;
    out.reserve(size);
    for (std::size_t p : picks) out.push_back(items[p]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

GroupComparisonReport group_experiment(const Dataset& ds, std::int64_t scenario, std::int64_t location,
                                       const std::vector<GroupMethod>& methods, std::uint64_t seed, Parallelism par) {
    const auto ref = ds.find(scenario, location);
    require(ref.has_value(), Errc::invalid_argument,
            fmt::format("reference record (scenario {}, location {}) not found", scenario, location));

    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i == *ref) continue;
        if (ds.info(i).location_id == location) a.push_back(i);
        else if (ds.info(i).scenario_id == scenario) b.push_back(i);
    }
    require(!a.empty() && !b.empty(), Errc::invalid_argument,
            fmt::format("group A has {} and group B has {} records; both must be non-empty", a.size(), b.size()));
    const std::size_t size = std::min(a.size(), b.size());
    a = seeded_subsample(std::move(a), size, seed);
    b = seeded_subsample(std::move(b), size, seed + 1);

    GroupComparisonReport report;
    report.reference_scenario = scenario;
    report.reference_location = location;
    report.reference_index = *ref;
    report.seed = seed;
    report.group_a = a;
    report.group_b = b;

    for (const auto& method : methods) {
        const auto data = prepare(ds, method.preprocessing);
        const auto rep = make_representation(data, method.representation, par);
        try {
            check_applicable(method.distance, rep.dimension());
        } catch (const Error& e) {
            fail(Errc::invalid_argument, fmt::format("method '{}': {}", method.name, e.what()));
        }
        DistanceSpec dist = method.distance;
        if (dist.kind == DistanceKind::dtw_banded && !dist.band) dist.band = default_band(rep.dimension());

        GroupDistanceSummary s;
        s.name = method.name;
        s.distance = dist.label();
        const auto x = row_span(rep.features, static_cast<Eigen::Index>(*ref));
        for (std::size_t i : a) s.distances_a.push_back(distance(x, row_span(rep.features, static_cast<Eigen::Index>(i)), dist));
        for (std::size_t i : b) s.distances_b.push_back(distance(x, row_span(rep.features, static_cast<Eigen::Index>(i)), dist));
        s.mean_a = mean_of(s.distances_a);
        s.mean_b = mean_of(s.distances_b);
        s.ratio_b_over_a = s.mean_a > 0.0 ? s.mean_b / s.mean_a : std::numeric_limits<double>::infinity();
        s.histogram = make_histogram(s.distances_a, s.distances_b);
        for (std::size_t bin = 0; bin < s.histogram.count_a.size(); ++bin) {
            s.overlap += std::min(static_cast<double>(s.histogram.count_a[bin]) / static_cast<double>(a.size()),
                                  static_cast<double>(s.histogram.count_b[bin]) / static_cast<double>(b.size()));
        }
        report.methods.push_back(std::move(s));
    }
    return report;
}

// ---------------------------------------------------------------------------

ClusterReport cluster_report(const Dataset& ds, const PipelineSpec& spec, Parallelism par) {
    ClusterReport out{run_pipeline(ds, spec, par), {}};
    const auto& best = out.run.clustering.best;
    const auto& series = out.run.data.values();
    const std::size_t k_max = std::min(spec.representative_k_max, out.run.data.length() / 2);
    for (std::size_t c = 0; c < best.k(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < best.labels.size(); ++i) {
            if (best.labels[i] == static_cast<int>(c)) members.push_back(i);
        }
        out.representatives.push_back(
            extract_representative(series, members, k_max, best.medoids[c], static_cast<int>(c)));
    }
    return out;
}

}  // namespace scenclust
