#pragma once

#include "scenclust/clustering.hpp"
#include "scenclust/distances.hpp"
#include "scenclust/types.hpp"

#include <vector>

namespace scenclust {

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kDefaultPerplexity = 30.0;
inline constexpr double kPerplexityTolerance = 1e-4;
inline constexpr int kBandwidthBisectionSteps = 64;

/// Joint Gaussian affinities over N points.
///
/// p_ij = (p_{j|i} + p_{i|j}) / 2N with p_{j|i} proportional to
/// exp(-d_ij^2 / (2 sigma_i^2)); each sigma_i matches the target perplexity.
/// Off-diagonal entries are floored at kProbabilityFloor and renormalized.
struct AffinityModel {
    Matrix joint;
    double perplexity = 0.0;
    std::vector<double> bandwidths;
    /// Achieved 2^entropy of each conditional row before symmetrization.
    std::vector<double> row_perplexity;

    std::size_t size() const { return static_cast<std::size_t>(joint.rows()); }
};

/// 30, reduced to (N - 1) / 3 for small N.
double default_perplexity(std::size_t n);

AffinityModel affinities(const Matrix& d, double perplexity, Parallelism par = {});
inline AffinityModel affinities(const DistanceMatrix& d, double perplexity, Parallelism par = {}) {
    return affinities(d.values, perplexity, par);
}

/// KL(P||Q)/2 + KL(Q||P)/2 over off-diagonal entries, natural log.
double js_divergence(const Matrix& p, const Matrix& q);
inline double js_divergence(const AffinityModel& p, const AffinityModel& q) { return js_divergence(p.joint, q.joint); }

/// 2 / (1 + e^d).
double fidelity_from_divergence(double divergence);

struct FidelityResult {
    double fidelity = 1.0;
    double divergence = 0.0;
};

FidelityResult fidelity(const Matrix& d_reference, const Matrix& d_features, double perplexity, Parallelism par = {});
inline FidelityResult fidelity(const DistanceMatrix& d_reference, const DistanceMatrix& d_features, double perplexity,
                               Parallelism par = {}) {
    return fidelity(d_reference.values, d_features.values, perplexity, par);
}

/// Mean squared distance to the assigned medoid over the mean squared
/// distance between distinct records.
double within_index(const Matrix& d, const std::vector<int>& labels, const std::vector<std::size_t>& medoids);
inline double within_index(const Matrix& d, const ClusteringResult& c) { return within_index(d, c.labels, c.medoids); }
inline double within_index(const DistanceMatrix& d, const ClusteringResult& c) {
    return within_index(d.values, c.labels, c.medoids);
}

/// F * (1 - W). Negative when W > 1; reported as is.
double combined_index(double fidelity, double within);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Mean adjusted Rand index over all unordered pairs of runs.
double consensus_index(const std::vector<std::vector<int>>& labelings);
double consensus_index(const std::vector<ClusteringResult>& runs);

}  // namespace scenclust
