#include "scenclust/clustering.hpp"

#include "parallel.hpp"
#include "scenclust/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scenclust {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    require(n > 0, Errc::invalid_argument, "uniform_index over an empty range");
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return static_cast<std::size_t>(draw % range);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::uint64_t seed) {
    require(k <= n, Errc::invalid_argument, fmt::format("cannot sample {} of {} items", k, n));
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
    pool.resize(k);
    return pool;
}

std::string_view to_string(KMedoidsInit init) {
    return init == KMedoidsInit::uniform ? "uniform" : "plus_plus";
}

KMedoidsInit kmedoids_init_from_string(std::string_view name) {
    if (name == "uniform") return KMedoidsInit::uniform;
    if (name == "plus_plus" || name == "plusplus" || name == "k-medoids++") return KMedoidsInit::plus_plus;
    fail(Errc::invalid_argument, fmt::format("unknown initialization '{}'", name));
}

std::vector<std::size_t> plus_plus_medoids(const Matrix& d, std::size_t k, std::uint64_t seed) {
    const auto N = static_cast<std::size_t>(d.rows());
    require(d.rows() == d.cols(), Errc::invalid_argument, "distance matrix must be square");
    require(k >= 1 && k <= N, Errc::invalid_argument, fmt::format("k must lie in [1, {}], got {}", N, k));
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto sq = [&d](std::size_t i, std::size_t j) {
        const double v = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        return v * v;
    };

    std::vector<std::size_t> medoids{uniform_index(rng, N)};
    std::vector<bool> chosen(N, false);
    chosen[medoids[0]] = true;
    std::vector<double> nearest(N);
    for (std::size_t i = 0; i < N; ++i) nearest[i] = sq(i, medoids[0]);
    const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));

    while (medoids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < N; ++i) total += chosen[i] ? 0.0 : nearest[i];
        std::size_t pick = N;
        if (!(total > 0.0)) {
            // Every remaining record coincides with a medoid.
            std::size_t r = uniform_index(rng, N - medoids.size());
            for (std::size_t i = 0; i < N; ++i) {
                if (!chosen[i] && r-- == 0) {
                    pick = i;
                    break;
                }
            }
        } else {
            double best_potential = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < trials; ++t) {
                const double u = unit() * total;
                std::size_t candidate = N;
                double acc = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    if (chosen[i] || nearest[i] <= 0.0) continue;
                    candidate = i;
                    acc += nearest[i];
                    if (acc > u) break;
                }
                double potential = 0.0;
                for (std::size_t i = 0; i < N; ++i) potential += std::min(nearest[i], sq(i, candidate));
                if (potential < best_potential) {
                    best_potential = potential;
                    pick = candidate;
                }
            }
        }
        chosen[pick] = true;
        medoids.push_back(pick);
        for (std::size_t i = 0; i < N; ++i) nearest[i] = std::min(nearest[i], sq(i, pick));
    }
    return medoids;
}

std::vector<std::size_t> initial_medoids(const Matrix& d, std::size_t k, std::uint64_t seed, KMedoidsInit init) {
    if (init == KMedoidsInit::uniform) return sample_without_replacement(static_cast<std::size_t>(d.rows()), k, seed);
    return plus_plus_medoids(d, k, seed);
}

double clustering_objective(const Matrix& d, const std::vector<int>& labels, const std::vector<std::size_t>& medoids) {
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        total += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(medoids[static_cast<std::size_t>(labels[i])]));
    }
    return total;
}

namespace {

void check_distance_matrix(const Matrix& d) {
    require(d.rows() == d.cols(), Errc::invalid_argument,
            fmt::format("distance matrix must be square, got {}x{}", d.rows(), d.cols()));
}

/// Nearest medoid per record, ties to the lowest cluster index. A medoid is
/// always assigned to its own cluster, which keeps every cluster non-empty.
std::vector<int> assign(const Matrix& d, const std::vector<std::size_t>& medoids) {
    const auto N = static_cast<std::size_t>(d.rows());
    std::vector<int> labels(N, -1);
    for (std::size_t c = 0; c < medoids.size(); ++c) labels[medoids[c]] = static_cast<int>(c);
    for (std::size_t i = 0; i < N; ++i) {
        if (labels[i] >= 0) continue;
        int best = 0;
        double best_d = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(medoids[0]));
        for (std::size_t c = 1; c < medoids.size(); ++c) {
            const double dc = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(medoids[c]));
            if (dc < best_d) {
                best_d = dc;
                best = static_cast<int>(c);
            }
        }
        labels[i] = best;
    }
    return labels;
}

/// Member minimizing the summed distance to the other members; the current
/// medoid wins ties, then the lowest index.
std::vector<std::size_t> update_medoids(const Matrix& d, const std::vector<int>& labels,
                                        const std::vector<std::size_t>& medoids) {
    std::vector<std::vector<std::size_t>> members(medoids.size());
    for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
    std::vector<std::size_t> out = medoids;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
        auto cost = [&](std::size_t candidate) {
            double s = 0.0;
            for (std::size_t j : members[c]) s += d(static_cast<Eigen::Index>(candidate), static_cast<Eigen::Index>(j));
            return s;
        };
        double best_cost = cost(medoids[c]);
        for (std::size_t candidate : members[c]) {
            const double cc = cost(candidate);
            if (cc < best_cost) {
                best_cost = cc;
                out[c] = candidate;
            }
        }
    }
    return out;
}

}  // namespace

ClusteringResult kmedoids_from(const Matrix& d, std::vector<std::size_t> initial_medoids, std::uint64_t seed) {
    check_distance_matrix(d);
    const auto N = static_cast<std::size_t>(d.rows());
    const std::size_t k = initial_medoids.size();
    require(k >= 1 && k <= N, Errc::invalid_argument, fmt::format("k must lie in [1, {}], got {}", N, k));
    {
        auto sorted = initial_medoids;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() && sorted.back() < N,
                Errc::invalid_argument, "initial medoids must be distinct record indices");
    }

    ClusteringResult r;
    r.seed = seed;
    r.medoids = std::move(initial_medoids);
    r.labels = assign(d, r.medoids);
    r.objective = clustering_objective(d, r.labels, r.medoids);
    r.objective_history.push_back(r.objective);

    for (int it = 1; it <= kMaxKMedoidsIterations; ++it) {
        auto medoids = update_medoids(d, r.labels, r.medoids);
        auto labels = assign(d, medoids);
        const bool converged = labels == r.labels && medoids == r.medoids;
        r.medoids = std::move(medoids);
        r.labels = std::move(labels);
        r.objective = clustering_objective(d, r.labels, r.medoids);
        r.objective_history.push_back(r.objective);
        r.n_iterations = it;
        if (converged) break;
    }
    return r;
}

ClusteringResult kmedoids(const Matrix& d, std::size_t k, std::uint64_t seed, KMedoidsInit init) {
    check_distance_matrix(d);
    const auto N = static_cast<std::size_t>(d.rows());
    require(k >= 1 && k <= N, Errc::invalid_argument, fmt::format("k must lie in [1, {}], got {}", N, k));
    return kmedoids_from(d, initial_medoids(d, k, seed, init), seed);
}

RestartResult kmedoids_restarts(const Matrix& d, std::size_t k, std::size_t n_runs, std::uint64_t seed,
                                Parallelism par, KMedoidsInit init) {
    require(n_runs >= 1, Errc::invalid_argument, "n_runs must be at least 1");
    check_distance_matrix(d);
    const auto N = static_cast<std::size_t>(d.rows());
    require(k >= 1 && k <= N, Errc::invalid_argument, fmt::format("k must lie in [1, {}], got {}", N, k));

    RestartResult out;
    out.runs.resize(n_runs);
    detail::FirstError error;
    const auto runs = static_cast<long long>(n_runs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(detail::thread_count(par))
    for (long long r = 0; r < runs; ++r) {
        try {
            out.runs[static_cast<std::size_t>(r)] = kmedoids(d, k, seed + static_cast<std::uint64_t>(r), init);
        } catch (...) {
            error.capture(r);
        }
    }
    error.rethrow();
    for (std::size_t r = 1; r < n_runs; ++r) {
        if (out.runs[r].objective < out.runs[out.best_run].objective) out.best_run = r;
    }
    out.best = out.runs[out.best_run];
    return out;
}

// ---------------------------------------------------------------------------
// Representatives

namespace {

struct Span {
    std::ptrdiff_t begin, end;
};

double pearson(const double* a, const double* b, std::size_t n) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        ma += a[t];
        mb += b[t];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double da = a[t] - ma, db = b[t] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return -std::numeric_limits<double>::infinity();
    return sab / std::sqrt(saa * sbb);
}

Span common_support(const std::vector<int>& lags, std::ptrdiff_t T) {
    Span s{0, T};
    for (int lag : lags) {
        s.begin = std::max<std::ptrdiff_t>(s.begin, -lag);
        s.end = std::min<std::ptrdiff_t>(s.end, T - lag);
    }
    return s;
}

}  // namespace

Representative extract_representative(const Matrix& series, const std::vector<std::size_t>& members,
                                      std::size_t k_max, std::optional<std::size_t> seed_member, int cluster_id) {
    require(!members.empty(), Errc::invalid_argument, "representative of an empty cluster");
    const auto T = static_cast<std::ptrdiff_t>(series.cols());
    require(static_cast<std::ptrdiff_t>(k_max) < T, Errc::invalid_argument,
            fmt::format("k_max={} must be below the series length {}", k_max, T));
    for (std::size_t m : members) {
        require(m < static_cast<std::size_t>(series.rows()), Errc::invalid_argument,
                fmt::format("member index {} out of range", m));
        const auto row = series.row(static_cast<Eigen::Index>(m));
        require(row.maxCoeff() > row.minCoeff(), Errc::zero_variance,
                fmt::format("member {} is constant; correlation is undefined", m));
    }
    const std::size_t seed = seed_member.value_or(members.front());

    Representative rep;
    rep.cluster_id = cluster_id;
    rep.members = members;
    rep.member_lags.assign(members.size(), 0);

    std::vector<double> bary(series.row(static_cast<Eigen::Index>(seed)).data(),
                             series.row(static_cast<Eigen::Index>(seed)).data() + T);
    Span support{0, T};

    const auto kmax = static_cast<int>(k_max);
    for (int it = 1; it <= kMaxRepresentativeIterations; ++it) {
        std::vector<int> lags(members.size(), 0);
        for (std::size_t m = 0; m < members.size(); ++m) {
            const double* x = series.row(static_cast<Eigen::Index>(members[m])).data();
            double best = -std::numeric_limits<double>::infinity();
            int best_lag = 0;
            // Lags visited as 0, -1, +1, -2, +2, ...; ties keep the smaller shift.
            for (int step = 0; step <= 2 * kmax; ++step) {
                const int lag = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
                const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(support.begin, -lag);
                const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(support.end, T - lag);
                if (hi - lo < 3) continue;
                const double c = pearson(x + lo + lag, bary.data() + (lo - support.begin), static_cast<std::size_t>(hi - lo));
                if (c > best + 1e-12) {
                    best = c;
                    best_lag = lag;
                }
            }
            lags[m] = best_lag;
        }

        const bool changed = it == 1 || lags != rep.member_lags;
        rep.member_lags = lags;
        support = common_support(lags, T);
        require(support.end - support.begin >= 1, Errc::degenerate_data,
                "aligned cluster members share no common support");
        bary.assign(static_cast<std::size_t>(support.end - support.begin), 0.0);
        for (std::size_t m = 0; m < members.size(); ++m) {
            const double* x = series.row(static_cast<Eigen::Index>(members[m])).data();
            for (std::ptrdiff_t t = support.begin; t < support.end; ++t) {
                bary[static_cast<std::size_t>(t - support.begin)] += x[t + lags[m]];
            }
        }
        for (double& v : bary) v /= static_cast<double>(members.size());
        rep.n_iterations = it;
        if (!changed) break;
    }
    rep.series = std::move(bary);
    rep.support_begin = static_cast<std::size_t>(support.begin);
    return rep;
}

}  // namespace scenclust
