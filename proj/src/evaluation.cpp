#include "scenclust/evaluation.hpp"

#include "parallel.hpp"
#include "scenclust/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace scenclust {

double default_perplexity(std::size_t n) {
    return std::min(kDefaultPerplexity, (static_cast<double>(n) - 1.0) / 3.0);
}

namespace {

struct RowSolve {
    std::vector<double> conditional;  // p_{j|i}, zero at j == i
    double bandwidth = 0.0;
    double perplexity = 0.0;
};

/// Natural-log entropy of the row softmax(-beta * s) with s >= 0.
double row_distribution(const std::vector<double>& s, double beta, std::vector<double>& p) {
    double z = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        p[j] = std::exp(-beta * s[j]);
        z += p[j];
    }
    double h = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        p[j] /= z;
        if (p[j] > 0.0) h -= p[j] * std::log(p[j]);
    }
    return h;
}

RowSolve solve_row(const Matrix& d, Eigen::Index i, double perplexity) {
    const Eigen::Index N = d.rows();
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(N - 1));
    for (Eigen::Index j = 0; j < N; ++j) {
        if (j != i) s.push_back(d(i, j) * d(i, j));
    }
    // Subtracting the row minimum leaves the conditional unchanged.
    const double min_s = *std::min_element(s.begin(), s.end());
    double scale = 0.0;
    for (double& v : s) {
        v -= min_s;
        scale += v;
    }
    scale /= static_cast<double>(s.size());

    std::vector<double> p(s.size());
    double beta = 0.0;
    double h = 0.0;
    const double target = std::log(perplexity);
    if (scale > 0.0) {
        // Bisection on u = log(beta * scale); entropy decreases in u.
        double lo = -50.0, hi = 50.0;
        for (int step = 0; step < kBandwidthBisectionSteps; ++step) {
            const double u = 0.5 * (lo + hi);
            beta = std::exp(u) / scale;
            h = row_distribution(s, beta, p);
            if (std::abs(std::exp(h) - perplexity) <= kPerplexityTolerance) break;
            if (h > target) lo = u;
            else hi = u;
        }
    } else {
        h = row_distribution(s, 0.0, p);
    }
    const double achieved = std::exp(h);
    if (!(std::abs(achieved - perplexity) <= kPerplexityTolerance)) {
        fail(Errc::bisection_failure,
             fmt::format("bandwidth search for point {} reached perplexity {} instead of {} (degenerate distances)", i,
                         achieved, perplexity));
    }

    RowSolve out;
    out.conditional.assign(static_cast<std::size_t>(N), 0.0);
    std::size_t k = 0;
    for (Eigen::Index j = 0; j < N; ++j) {
        if (j != i) out.conditional[static_cast<std::size_t>(j)] = p[k++];
    }
    out.bandwidth = beta > 0.0 ? std::sqrt(1.0 / (2.0 * beta)) : std::numeric_limits<double>::infinity();
    out.perplexity = achieved;
    return out;
}

}  // namespace

AffinityModel affinities(const Matrix& d, double perplexity, Parallelism par) {
    require(d.rows() == d.cols(), Errc::invalid_argument, "distance matrix must be square");
    const Eigen::Index N = d.rows();
    require(N >= 3, Errc::invalid_argument, fmt::format("affinities need at least 3 points, got {}", N));
    require(perplexity > 1.0 && perplexity < static_cast<double>(N), Errc::invalid_argument,
            fmt::format("perplexity must lie in (1, {}), got {}", N, perplexity));

    Matrix conditional = Matrix::Zero(N, N);
    AffinityModel model;
    model.perplexity = perplexity;
    model.bandwidths.resize(static_cast<std::size_t>(N));
    model.row_perplexity.resize(static_cast<std::size_t>(N));
    detail::FirstError error;
#pragma omp parallel for schedule(static) num_threads(detail::thread_count(par))
    for (Eigen::Index i = 0; i < N; ++i) {
        try {
            auto row = solve_row(d, i, perplexity);
            std::copy(row.conditional.begin(), row.conditional.end(), conditional.row(i).data());
            model.bandwidths[static_cast<std::size_t>(i)] = row.bandwidth;
            model.row_perplexity[static_cast<std::size_t>(i)] = row.perplexity;
        } catch (...) {
            error.capture(i);
        }
    }
    error.rethrow();

    model.joint = (conditional + conditional.transpose()) / (2.0 * static_cast<double>(N));
    double total = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) {
            if (i == j) {
                model.joint(i, j) = 0.0;
                continue;
            }
            model.joint(i, j) = std::max(model.joint(i, j), kProbabilityFloor);
            total += model.joint(i, j);
        }
    }
    model.joint /= total;
    return model;
}

double js_divergence(const Matrix& p, const Matrix& q) {
    require(p.rows() == q.rows() && p.cols() == q.cols() && p.rows() == p.cols(), Errc::length_mismatch,
            fmt::format("affinity size mismatch: {}x{} vs {}x{}", p.rows(), p.cols(), q.rows(), q.cols()));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (i == j) continue;
            const double a = p(i, j), b = q(i, j);
            require(a > 0.0 && b > 0.0, Errc::invalid_argument, "affinities must be strictly positive off the diagonal");
            sum += (a - b) * std::log(a / b);
        }
    }
    return 0.5 * sum;
}

double fidelity_from_divergence(double divergence) { return 2.0 / (1.0 + std::exp(divergence)); }

FidelityResult fidelity(const Matrix& d_reference, const Matrix& d_features, double perplexity, Parallelism par) {
    require(d_reference.rows() == d_features.rows(), Errc::length_mismatch,
            "reference and feature distance matrices cover different record counts");
    const auto p = affinities(d_reference, perplexity, par);
    const auto q = affinities(d_features, perplexity, par);
    const double div = js_divergence(p, q);
    return {fidelity_from_divergence(div), div};
}

double within_index(const Matrix& d, const std::vector<int>& labels, const std::vector<std::size_t>& medoids) {
    const Eigen::Index N = d.rows();
    require(d.cols() == N && static_cast<Eigen::Index>(labels.size()) == N, Errc::invalid_argument,
            "clustering does not match the distance matrix size");
    require(N >= 2, Errc::invalid_argument, "within index needs at least 2 records");
    double within = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto label = labels[static_cast<std::size_t>(i)];
        require(label >= 0 && static_cast<std::size_t>(label) < medoids.size(), Errc::invalid_argument,
                fmt::format("record {} has label {} outside [0, {})", i, label, medoids.size()));
        const double v = d(i, static_cast<Eigen::Index>(medoids[static_cast<std::size_t>(label)]));
        within += v * v;
    }
    within /= static_cast<double>(N);

    double between = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) {
            if (i != j) between += d(i, j) * d(i, j);
        }
    }
    between /= static_cast<double>(N) * static_cast<double>(N - 1);
    require(between > 0.0, Errc::degenerate_data, "all pairwise distances are zero; within index undefined");
    return within / between;
}

double combined_index(double fidelity, double within) { return fidelity * (1.0 - within); }

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    require(a.size() == b.size(), Errc::length_mismatch,
            fmt::format("labelings cover {} and {} records", a.size(), b.size()));
    const std::size_t n = a.size();
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ca, cb;
    for (std::size_t i = 0; i < n; ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ca[a[i]] += 1.0;
        cb[b[i]] += 1.0;
    }
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, c] : joint) index += choose2(c);
    for (const auto& [key, c] : ca) sum_a += choose2(c);
    for (const auto& [key, c] : cb) sum_b += choose2(c);
    const double expected = sum_a * sum_b / choose2(static_cast<double>(n));
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double consensus_index(const std::vector<std::vector<int>>& labelings) {
    require(labelings.size() >= 2, Errc::invalid_argument, "consensus index needs at least 2 runs");
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t r = 0; r < labelings.size(); ++r) {
        for (std::size_t s = r + 1; s < labelings.size(); ++s) {
            total += adjusted_rand_index(labelings[r], labelings[s]);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

double consensus_index(const std::vector<ClusteringResult>& runs) {
    std::vector<std::vector<int>> labelings;
    labelings.reserve(runs.size());
    for (const auto& r : runs) labelings.push_back(r.labels);
    return consensus_index(labelings);
}

}  // namespace scenclust
