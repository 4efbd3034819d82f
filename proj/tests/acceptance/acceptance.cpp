// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include "scenclust/clustering.hpp"
#include "scenclust/dataset.hpp"
#include "scenclust/distances.hpp"
#include "scenclust/evaluation.hpp"
#include "scenclust/experiments.hpp"
#include "scenclust/transforms.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace scenclust;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        failed_ = failed_ || !ok;
    }
    Outcome outcome(const std::string& summary) const {
        if (!failed_) return {true, summary};
        std::string d = summary + "; failed:";
        for (const auto& f : failures_) d += " [" + f + "]";
        return {false, d};
    }

private:
    bool failed_ = false;
    std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Matrix euclidean(const Matrix& x) {
    Matrix d(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.rows(); ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
    return d;
}

int available_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---------------------------------------------------------------------------

Outcome kernel_oracles() {
    const auto start = std::chrono::steady_clock::now();
    Checks c;
    std::mt19937_64 rng(20240601);
    auto symbol = [&] { return static_cast<double>(rng() % 3); };
    std::size_t dtw_cases = 0, mlpc_cases = 0, mlpc_undefined = 0;
    double worst_mlpc = 0.0;
    for (int n_case = 0; n_case < 10000; ++n_case) {
        // DTW: independent lengths in [1, 8].
        std::vector<double> z(1 + rng() % 8), w(1 + rng() % 8);
        for (auto& v : z) v = symbol();
        for (auto& v : w) v = symbol();
        c.expect(dist_dtw(z, w) == oracle::dtw_paths(z, w, true), fmt::format("dtw squared case {}", n_case));
        c.expect(dist_dtw(z, w, DtwCost::absolute) == oracle::dtw_paths(z, w, false),
                 fmt::format("dtw absolute case {}", n_case));
        ++dtw_cases;

        // MLPC: common length in [4, 8], every admissible k_max.
        const std::size_t T = 4 + rng() % 5;
        std::vector<double> a(T), b(T);
        for (auto& v : a) v = symbol();
        for (auto& v : b) v = symbol();
        const std::size_t k_max = rng() % (T - 2);
        const double expect = oracle::mlpc(a, b, static_cast<int>(k_max));
        if (std::isnan(expect)) {
            bool threw = false;
            try {
                dist_mlpc(a, b, k_max);
            } catch (const Error& e) {
                threw = e.code() == Errc::zero_variance;
            }
            c.expect(threw, fmt::format("mlpc case {} should report a constant overlap", n_case));
            ++mlpc_undefined;
        } else {
            const double got = dist_mlpc(a, b, k_max);
            worst_mlpc = std::max(worst_mlpc, std::abs(got - expect));
            c.expect(std::abs(got - expect) <= 1e-10, fmt::format("mlpc case {}: {} vs {}", n_case, got, expect));
            ++mlpc_cases;
        }
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 60.0, fmt::format("runtime {:.1f}s", elapsed));
    return c.outcome(fmt::format("{} DTW pairs exact, {} MLPC pairs max err {:.2e} ({} undefined, all rejected), {:.1f}s",
                                 dtw_cases, mlpc_cases, worst_mlpc, mlpc_undefined, elapsed));
}

Outcome mlpc_properties() {
    Checks c;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-50.0, 50.0);
    double worst_affine = 0.0;
    for (int n_case = 0; n_case < 1000; ++n_case) {
        // Mix white noise and smooth signals.
        auto z = oracle::random_series(rng, 128);
        auto w = oracle::random_series(rng, 128);
        if (n_case % 2 == 0) {
            for (std::size_t t = 1; t < z.size(); ++t) {
                z[t] += 0.9 * z[t - 1];
                w[t] += 0.9 * w[t - 1];
            }
        }
        const double d = dist_mlpc(z, w, 16);
        c.expect(d >= 0.0 && d <= 2.0, fmt::format("case {} out of range: {}", n_case, d));
        c.expect(d == dist_mlpc(w, z, 16), fmt::format("case {} asymmetric", n_case));
        const double a = scale(rng), b = shift(rng), cc = scale(rng), e = shift(rng);
        std::vector<double> za(z.size()), wa(w.size());
        for (std::size_t t = 0; t < z.size(); ++t) {
            za[t] = a * z[t] + b;
            wa[t] = cc * w[t] + e;
        }
        const double diff = std::abs(dist_mlpc(za, wa, 16) - d);
        worst_affine = std::max(worst_affine, diff);
        c.expect(diff <= 1e-9, fmt::format("case {} affine diff {:.3e}", n_case, diff));
        double prev = 3.0;
        for (std::size_t k : {0, 4, 16, 64}) {
            const double dk = dist_mlpc(z, w, k);
            c.expect(dk <= prev, fmt::format("case {} increases at k_max={}", n_case, k));
            prev = dk;
        }
    }
    return c.outcome(fmt::format("1000 pairs: range, symmetry, monotone k_max; worst affine diff {:.2e}", worst_affine));
}

Outcome transform_identities() {
    Checks c;
    double worst_haar = 0.0, worst_fourier = 0.0, worst_pca = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t T = seed % 2 == 0 ? 512 : 300 + seed;
        const auto ds = testing::make_dataset(testing::random_matrix(20, T, seed, 1.0 + static_cast<double>(seed)));
        const auto haar = transform_haar(ds, HaarMode::with_energy(1.0));
        const auto four = transform_fourier(ds, 1.0);
        for (Eigen::Index i = 0; i < 20; ++i) {
            const double e = ds.values().row(i).squaredNorm();
            worst_haar = std::max(worst_haar, std::abs(haar.features.row(i).squaredNorm() - e) / e);
            worst_fourier = std::max(worst_fourier, std::abs(four.features.row(i).squaredNorm() - e) / e);
        }
        for (double alpha : {0.5, 0.9, 0.95, 0.99}) {
            const auto pca = transform_pca(ds, alpha);
            double dropped = 0.0;
            for (std::size_t j = pca.dimension(); j < pca.eigenvalues.size(); ++j) dropped += pca.eigenvalues[j];
            const double expect = static_cast<double>(ds.size()) * dropped;
            const double err = (reconstruct(pca) - ds.values()).squaredNorm();
            double total = 0.0;
            for (double e : pca.eigenvalues) total += e;
            if (dropped > 1e-12 * total) {
                worst_pca = std::max(worst_pca, std::abs(err - expect) / expect);
            } else {
                // Every component kept: reconstruction must be exact up to rounding.
                c.expect(err <= 1e-18 * ds.values().squaredNorm() * static_cast<double>(T),
                         fmt::format("full PCA reconstruction error {:.2e}", err));
            }
        }
        std::size_t ph = 0, pf = 0, pp = 0;
        for (int step = 1; step <= 20; ++step) {
            const double alpha = step / 20.0;
            const auto h = transform_haar(ds, HaarMode::with_energy(alpha)).dimension();
            const auto f = transform_fourier(ds, alpha).dimension();
            const auto p = transform_pca(ds, alpha).dimension();
            c.expect(h >= ph && f >= pf && p >= pp, fmt::format("p not monotone at alpha={} seed={}", alpha, seed));
            ph = h;
            pf = f;
            pp = p;
        }
    }
    c.expect(worst_haar <= 1e-9, fmt::format("Haar Parseval {:.2e}", worst_haar));
    c.expect(worst_fourier <= 1e-9, fmt::format("Fourier Parseval {:.2e}", worst_fourier));
    c.expect(worst_pca <= 1e-6, fmt::format("PCA reconstruction {:.2e}", worst_pca));
    return c.outcome(fmt::format("Parseval rel err Haar {:.1e}, Fourier {:.1e}; PCA bookkeeping rel err {:.1e}; p monotone in alpha",
                                 worst_haar, worst_fourier, worst_pca));
}

Matrix separated_blobs(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.0, 0.05), angle(0.0, 2 * std::numbers::pi);
    Matrix x(10, 2);
    for (Eigen::Index i = 0; i < 10; ++i) {
        const double r = radius(rng), a = angle(rng);
        x(i, 0) = (i < 5 ? 0.0 : 10.0) + r * std::cos(a);
        x(i, 1) = r * std::sin(a);
    }
    return euclidean(x);
}

Outcome kmedoids_behaviour() {
    Checks c;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Matrix d = euclidean(testing::random_matrix(60, 3, 1000 + seed));
        const auto r = kmedoids(d, 6, seed);
        for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
            c.expect(r.objective_history[i] <= r.objective_history[i - 1],
                     fmt::format("seed {} objective rose at iteration {}", seed, i));
        }
        c.expect(kmedoids(d, 6, seed) == r && kmedoids(d, 6, seed) == r, fmt::format("seed {} not deterministic", seed));
    }
    const Matrix blobs = separated_blobs(42);
    std::vector<std::vector<double>> nested(10);
    for (Eigen::Index i = 0; i < 10; ++i) nested[static_cast<std::size_t>(i)].assign(blobs.row(i).data(), blobs.row(i).data() + 10);
    const auto best = oracle::kmedoids_exhaustive(nested, 2);
    std::set<std::size_t> best_medoids(best.medoids.begin(), best.medoids.end());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = kmedoids(blobs, 2, seed);
        c.expect(std::set<std::size_t>(r.medoids.begin(), r.medoids.end()) == best_medoids &&
                     std::abs(r.objective - best.objective) <= 1e-12,
                 fmt::format("blobs seed {} objective {} vs optimum {}", seed, r.objective, best.objective));
    }
    return c.outcome("100 runs monotone and repeatable; blobs optimum recovered for 20/20 seeds");
}

Outcome index_algebra() {
    Checks c;
    const Matrix d = euclidean(testing::random_matrix(12, 3, 5));
    const auto all = kmedoids(d, 12, 1);
    c.expect(within_index(d, all) == 0.0, "W at k = N");

    Matrix four(4, 4);
    four << 0, 1, 10, 10, 1, 0, 10, 10, 10, 10, 0, 1, 10, 10, 1, 0;
    const double w = within_index(four, {0, 0, 1, 1}, {0, 2});
    c.expect(std::abs(w - 0.5 / 67.0) <= 1e-12, fmt::format("4-point W {}", w));

    const auto ds = generate_synthetic({});
    const auto ref = reference_distances(ds, {DistanceKind::l2});
    const auto f = fidelity(ref, ref, default_perplexity(ds.size()));
    c.expect(f.fidelity == 1.0 && f.divergence == 0.0, "F on identical distances");

    c.expect(std::abs(fidelity_from_divergence(std::log(3.0)) - 0.5) <= 1e-12, "F at ln 3");

    PipelineSpec p = standard_pipelines({DistanceKind::l2}, 5, 3, 1, 16, std::nullopt)[3];
    const auto r = evaluate_pipeline(ds, p);
    c.expect(r.index == r.fidelity * (1.0 - r.within), "I = F(1 - W) bit-exact");
    return c.outcome(fmt::format("W(k=N)=0, W4={:.12f}, F(identical)=1, F(ln 3)=0.5, I composed exactly", w));
}

Outcome phase_transition() {
    const auto start = std::chrono::steady_clock::now();
    Checks c;
    const auto ds = generate_synthetic({});  // 10 x 60, T = 512, spread 5, amplitude 1, noise 0.3, seed 7
    const auto methods = standard_group_methods(240, std::nullopt);
    const auto report = group_experiment(ds, 0, 0, methods, 7, {1});
    std::string detail = fmt::format("|A|=|B|={}", report.group_a.size());
    for (const auto& m : report.methods) {
        detail += fmt::format(", {} A={:.3f} B={:.3f}", m.name, m.mean_a, m.mean_b);
        if (m.name == "Mean") {
            c.expect(m.mean_a < m.mean_b && m.mean_b >= 1.5 * m.mean_a, fmt::format("Mean ratio B/A {:.3f}", m.mean_b / m.mean_a));
        }
        if (m.name == "MLPC" || m.name == "DTW") {
            c.expect(m.mean_b < m.mean_a && m.mean_a >= 1.5 * m.mean_b,
                     fmt::format("{} ratio A/B {:.3f}", m.name, m.mean_a / m.mean_b));
        }
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 600.0, fmt::format("runtime {:.1f}s", elapsed));
    return c.outcome(detail + fmt::format(", {:.1f}s single-threaded", elapsed));
}

/// 200 scenarios at one location drawn from 15 planted shapes.
SyntheticSpec planted_spec() {
    SyntheticSpec s;
    s.n_locations = 1;
    s.n_scenarios = 200;
    s.length = 512;
    s.n_shape_groups = 15;
    s.max_shape_lag = 16;
    s.rng_seed = 2024;
    return s;
}

constexpr std::size_t kPlantedKMax = 32;

Outcome pipeline_ranking() {
    Checks c;
    const auto ds = generate_synthetic(planted_spec());
    std::string detail;
    for (auto reference : {DistanceSpec{DistanceKind::mlpc, kPlantedKMax}, DistanceSpec{DistanceKind::l2}}) {
        const auto pipes = standard_pipelines(reference, 15, 5, 1, kPlantedKMax, std::nullopt);
        const auto outcomes = compare_pipelines(ds, pipes);
        std::vector<IndexReport> reports;
        for (const auto& o : outcomes) {
            c.expect(o.report.has_value(), fmt::format("pipeline {} failed: {}", o.spec.name, o.error));
            if (o.report) reports.push_back(*o.report);
        }
        const auto ranked = rank_reports(reports);
        if (ranked.empty()) continue;
        const auto& list = ranked.begin()->second;
        detail += fmt::format("{}ref {}:", detail.empty() ? "" : "; ", reference.label());
        for (const auto& r : list) detail += fmt::format(" {}={:.4f}", r.pipeline, r.index);
        auto index_of = [&](const std::string& name) {
            for (const auto& r : list)
                if (r.pipeline == name) return r.index;
            return -1e300;
        };
        if (reference.kind == DistanceKind::mlpc) {
            c.expect(list.front().pipeline == "MLPC", fmt::format("top pipeline under MLPC reference is {}", list.front().pipeline));
        } else {
            const double l2 = index_of("L2");
            const double best_reduced = std::max({index_of("Haar95"), index_of("Fourier95"), index_of("PCA95")});
            c.expect(best_reduced > l2, fmt::format("best reduced {:.4f} vs L2 {:.4f}", best_reduced, l2));
        }
    }
    return c.outcome(detail);
}

Outcome consensus_sanity() {
    Checks c;
    const auto ds = generate_synthetic(planted_spec());
    const auto pipe = standard_pipelines({DistanceKind::mlpc, kPlantedKMax}, 15, 5, 1, kPlantedKMax, std::nullopt)[5];
    const auto report = evaluate_pipeline(ds, pipe);
    c.expect(report.consensus >= 0.9, fmt::format("consensus {:.4f}", report.consensus));
    const std::vector<int> labels = generate_synthetic_with_truth(planted_spec()).shape_group;
    const double same = consensus_index({labels, labels, labels, labels, labels});
    c.expect(same == 1.0, "identical labelings");
    return c.outcome(fmt::format("MLPC 5-run mean pairwise ARI {:.4f}; identical labelings {}", report.consensus, same));
}

Outcome dtw_envelope() {
    Checks c;
    SyntheticSpec spec;
    spec.n_locations = 1;
    spec.n_scenarios = 200;
    spec.length = 2160;
    const auto x = zscore(generate_synthetic(spec)).values();
    DistanceSpec dtw{DistanceKind::dtw_banded};
    dtw.band = 216;
    // At least 8 workers so the schedule differs from the sequential run even on small machines.
    const int threads = std::max(8, available_threads());
    auto start = std::chrono::steady_clock::now();
    const auto parallel = distance_matrix(x, dtw, {threads});
    const double t_parallel = seconds_since(start);
    start = std::chrono::steady_clock::now();
    const auto sequential = distance_matrix(x, dtw, {1});
    const double t_sequential = seconds_since(start);
    c.expect(parallel.values == sequential.values, "parallel and sequential matrices differ");
    c.expect(t_parallel < 300.0, fmt::format("{:.1f}s on {} threads", t_parallel, threads));
    return c.outcome(fmt::format("{:.1f}s with {} threads on {} core(s), {:.1f}s sequential, bit-identical", t_parallel,
                                 threads, std::thread::hardware_concurrency(), t_sequential));
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "distance-kernel oracle equivalence", kernel_oracles},
        {2, "MLPC bounds and invariances", mlpc_properties},
        {3, "transform identities", transform_identities},
        {4, "K-Medoids monotonicity, optimum, determinism", kmedoids_behaviour},
        {5, "index algebra", index_algebra},
        {6, "phase transition on the default benchmark", phase_transition},
        {7, "pipeline ranking on planted shapes", pipeline_ranking},
        {8, "consensus sanity", consensus_sanity},
        {9, "banded DTW performance envelope", dtw_envelope},
    };
    std::set<int> only;
    for (int a = 1; a < argc; ++a) only.insert(std::stoi(argv[a]));

    int failed = 0;
    for (const auto& crit : criteria) {
        if (!only.empty() && !only.count(crit.id)) continue;
        Outcome o;
        try {
            o = crit.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        fmt::print("{} criterion {}: {} ({})\n", o.pass ? "PASS" : "FAIL", crit.id, crit.name, o.detail);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
