#pragma once

#include "scenclust/clustering.hpp"
#include "scenclust/dataset.hpp"
#include "scenclust/distances.hpp"
#include "scenclust/error.hpp"
#include "scenclust/evaluation.hpp"
#include "scenclust/transforms.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scenclust {

/// Representation + distance + K-Medoids, scored against a reference distance.
struct PipelineSpec {
    std::string name;
    RepresentationSpec representation;
    DistanceSpec distance;
    DistanceSpec reference;
    std::size_t k = 15;
    std::size_t n_runs = 5;
    std::uint64_t seed = 0;
    KMedoidsInit init = KMedoidsInit::plus_plus;
    /// Unset: default_perplexity(N).
    std::optional<double> perplexity;
    /// Lag window used when extracting cluster representatives.
    std::size_t representative_k_max = 240;
};

/// MLPC and DTW operate on z-scored series; L2 on globally centered ones.
Preprocessing preprocessing_for(const DistanceSpec& distance);

/// Brings a dataset to the requested preprocessing state. Raw data is
/// centered or z-scored; an already matching dataset is returned as is.
Dataset prepare(const Dataset& ds, Preprocessing target);

/// The seven models of the comparison table: mean, L2, Fourier95, Haar95,
/// PCA95 (all with L2), MLPC and DTW (on z-scored series).
std::vector<PipelineSpec> standard_pipelines(const DistanceSpec& reference, std::size_t k, std::size_t n_runs,
                                             std::uint64_t seed, std::size_t k_max, std::optional<std::size_t> band);

struct IndexReport {
    std::string pipeline;
    RepresentationSpec representation;
    std::size_t feature_dimension = 0;
    DistanceSpec feature_distance;
    DistanceSpec reference_distance;
    std::size_t k = 0;
    std::size_t n_runs = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> run_seeds;
    KMedoidsInit init = KMedoidsInit::plus_plus;
    double perplexity = 0.0;

    double within = 0.0;            // best run
    double within_mean_runs = 0.0;  // average over runs
    double divergence = 0.0;
    double fidelity = 0.0;
    double index = 0.0;  // fidelity * (1 - within)
    double consensus = 1.0;
    std::size_t best_run = 0;
    double best_objective = 0.0;
};

struct PipelineRun {
    Dataset data;  // preprocessed input of the representation
    Representation representation;
    DistanceMatrix features;
    RestartResult clustering;
};

/// Transform, feature distances and restarted K-Medoids for one pipeline.
PipelineRun run_pipeline(const Dataset& ds, const PipelineSpec& spec, Parallelism par = {});

/// Reference distances on the untransformed (appropriately preprocessed) data.
DistanceMatrix reference_distances(const Dataset& ds, const DistanceSpec& reference, Parallelism par = {});

IndexReport score_pipeline(const PipelineSpec& spec, const PipelineRun& run, const DistanceMatrix& reference,
                           Parallelism par = {});

IndexReport evaluate_pipeline(const Dataset& ds, const PipelineSpec& spec, Parallelism par = {});

struct PipelineOutcome {
    PipelineSpec spec;
    std::optional<IndexReport> report;
    std::optional<Errc> error_code;
    std::string error;
};

/// Evaluates every pipeline; a failing pipeline is reported and the rest
/// still run. Reference matrices are shared between pipelines.
std::vector<PipelineOutcome> compare_pipelines(const Dataset& ds, const std::vector<PipelineSpec>& pipelines,
                                               Parallelism par = {});

/// Successful reports grouped by reference distance label, each sorted by
/// decreasing index (ties by pipeline name).
std::map<std::string, std::vector<IndexReport>> rank_reports(const std::vector<IndexReport>& reports);

// --- Distance-significance experiment -----------------------------------------

struct GroupMethod {
    std::string name;
    RepresentationSpec representation;
    DistanceSpec distance;
    Preprocessing preprocessing = Preprocessing::global_centered;
};

/// L2, Haar95, MLPC, DTW and Mean, as paired in the distance-significance table.
std::vector<GroupMethod> standard_group_methods(std::size_t k_max, std::optional<std::size_t> band);

inline constexpr std::size_t kHistogramBins = 30;

struct Histogram {
    std::vector<double> edges;  // kHistogramBins + 1
    std::vector<std::size_t> count_a;
    std::vector<std::size_t> count_b;
};

struct GroupDistanceSummary {
    std::string name;
    std::string distance;
    std::vector<double> distances_a;
    std::vector<double> distances_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double ratio_b_over_a = 0.0;
    double overlap = 0.0;  // sum of bin-wise minima of the two normalized histograms
    Histogram histogram;
};

/// Group A: same location, other scenarios. Group B: same scenario, other
/// locations. The larger group is subsampled (seeded) to the smaller size.
struct GroupComparisonReport {
    std::int64_t reference_scenario = 0;
    std::int64_t reference_location = 0;
    std::size_t reference_index = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> group_a;
    std::vector<std::size_t> group_b;
    std::vector<GroupDistanceSummary> methods;
};

Histogram make_histogram(const std::vector<double>& a, const std::vector<double>& b, std::size_t bins = kHistogramBins);

GroupComparisonReport group_experiment(const Dataset& ds, std::int64_t scenario, std::int64_t location,
                                       const std::vector<GroupMethod>& methods, std::uint64_t seed,
                                       Parallelism par = {});

// --- Cluster report ---------------------------------------------------------------

struct ClusterReport {
    PipelineRun run;
    std::vector<Representative> representatives;
};

ClusterReport cluster_report(const Dataset& ds, const PipelineSpec& spec, Parallelism par = {});

}  // namespace scenclust
