#pragma once

#include "scenclust/clustering.hpp"
#include "scenclust/dataset.hpp"
#include "scenclust/distances.hpp"
#include "scenclust/experiments.hpp"
#include "scenclust/transforms.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace scenclust {

using Json = nlohmann::json;

Json to_json(const DistanceSpec& spec);
DistanceSpec distance_spec_from_json(const Json& j);

Json to_json(const RepresentationSpec& spec);
RepresentationSpec representation_spec_from_json(const Json& j);

Json to_json(const SyntheticSpec& spec);
Json to_json(const PipelineSpec& spec);

/// {labels, medoids, objective, seed, n_iterations, objective_history}
Json to_json(const ClusteringResult& result);
ClusteringResult clustering_result_from_json(const Json& j);

Json to_json(const IndexReport& report);
IndexReport index_report_from_json(const Json& j);

Json to_json(const GroupComparisonReport& report);
Json to_json(const PipelineOutcome& outcome);

/// Sidecar describing a representation (kind, params, kept positions).
Json representation_sidecar(const Representation& rep);

/// `record_index,f0,...,f{p-1}` rows.
std::string representation_csv(const Representation& rep);

/// `cluster_id,t,value` rows, t in original time coordinates.
std::string representatives_csv(const std::vector<Representative>& reps);
Json representative_lags(const std::vector<Representative>& reps);

/// `kind,record,t,value` rows for one cluster: members lag-aligned over the
/// common support, then the representative (record = -1).
std::string cluster_plot_csv(const Matrix& series, const Representative& rep);

/// `bin_left,count_A,count_B` rows.
std::string histogram_csv(const Histogram& h);

/// Ranked table: `rank,pipeline,I,F,W,D_JS,consensus,p`.
std::string ranking_csv(const std::vector<IndexReport>& ranked);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

}  // namespace scenclust
