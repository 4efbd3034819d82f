#pragma once

#include "scenclust/distances.hpp"
#include "scenclust/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace scenclust {

struct ClusteringResult {
    std::vector<int> labels;           // per record, in [0, k)
    std::vector<std::size_t> medoids;  // medoids[c] is the record index of cluster c's medoid
    double objective = 0.0;            // sum of distances to the assigned medoid
    int n_iterations = 0;
    std::uint64_t seed = 0;
    /// Objective after the initial assignment and after every update/assign round.
    std::vector<double> objective_history;

    std::size_t k() const { return medoids.size(); }
    bool operator==(const ClusteringResult&) const = default;
};

inline constexpr int kMaxKMedoidsIterations = 300;

/// Initial medoids: `uniform` draws k distinct records; `plus_plus` draws the
/// first uniformly and each next one with probability proportional to the
/// squared distance to the nearest medoid so far, keeping the best of
/// 2 + floor(ln k) candidates (greedy k-medoids++).
enum class KMedoidsInit { uniform, plus_plus };

std::string_view to_string(KMedoidsInit init);
KMedoidsInit kmedoids_init_from_string(std::string_view name);

/// Uniform integer in [0, n) from raw 64-bit draws (rejection sampling), so
/// results do not depend on the standard library's distributions.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

/// k distinct indices from [0, n), uniformly, in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::uint64_t seed);

std::vector<std::size_t> plus_plus_medoids(const Matrix& d, std::size_t k, std::uint64_t seed);

std::vector<std::size_t> initial_medoids(const Matrix& d, std::size_t k, std::uint64_t seed, KMedoidsInit init);

/// Alternating (Voronoi-iteration) K-Medoids from the given initial medoids.
ClusteringResult kmedoids_from(const Matrix& d, std::vector<std::size_t> initial_medoids, std::uint64_t seed = 0);

/// Alternating K-Medoids with seeded random initialization.
ClusteringResult kmedoids(const Matrix& d, std::size_t k, std::uint64_t seed,
                          KMedoidsInit init = KMedoidsInit::plus_plus);
inline ClusteringResult kmedoids(const DistanceMatrix& d, std::size_t k, std::uint64_t seed,
                                 KMedoidsInit init = KMedoidsInit::plus_plus) {
    return kmedoids(d.values, k, seed, init);
}

struct RestartResult {
    ClusteringResult best;
    std::size_t best_run = 0;
    std::vector<ClusteringResult> runs;
};

/// Runs kmedoids with seeds seed + r for r in [0, n_runs). The best run has
/// the lowest objective; ties go to the lowest run index.
RestartResult kmedoids_restarts(const Matrix& d, std::size_t k, std::size_t n_runs, std::uint64_t seed,
                                Parallelism par = {}, KMedoidsInit init = KMedoidsInit::plus_plus);
inline RestartResult kmedoids_restarts(const DistanceMatrix& d, std::size_t k, std::size_t n_runs,
                                       std::uint64_t seed, Parallelism par = {},
                                       KMedoidsInit init = KMedoidsInit::plus_plus) {
    return kmedoids_restarts(d.values, k, n_runs, seed, par, init);
}

/// Sum over records of the distance to the assigned medoid.
double clustering_objective(const Matrix& d, const std::vector<int>& labels, const std::vector<std::size_t>& medoids);

/// Lag-aligned barycenter of a cluster.
struct Representative {
    int cluster_id = 0;
    /// Barycenter values on the common support [support_begin, support_begin + series.size()).
    std::vector<double> series;
    std::size_t support_begin = 0;
    std::vector<std::size_t> members;
    /// member_lags[m]: member m is read as x[t + lag] when aligned.
    std::vector<int> member_lags;
    int n_iterations = 0;
};

inline constexpr int kMaxRepresentativeIterations = 20;

/// Iteratively aligns every member to the barycenter by the lag in
/// [-k_max, k_max] maximizing overlap Pearson correlation, then recomputes
/// the barycenter as the mean over the positions covered by all aligned
/// members. Starts from `seed_member` (typically the medoid); defaults to
/// the first member.
Representative extract_representative(const Matrix& series, const std::vector<std::size_t>& members,
                                      std::size_t k_max, std::optional<std::size_t> seed_member = std::nullopt,
                                      int cluster_id = 0);

}  // namespace scenclust
