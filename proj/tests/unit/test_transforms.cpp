#include <doctest.h>

#include "scenclust/transforms.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace scenclust;
using testing::error_code_of;
using testing::make_dataset;
using testing::random_matrix;

namespace {

double energy(const Matrix& m) { return m.squaredNorm(); }

Matrix sinusoids(std::size_t T, std::vector<std::pair<double, double>> amp_freq, std::size_t rows = 3) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(T));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (std::size_t t = 0; t < T; ++t) {
            for (auto [a, f] : amp_freq) {
                m(r, static_cast<Eigen::Index>(t)) +=
                    (1.0 + 0.1 * static_cast<double>(r)) * a *
                    std::sin(2 * std::numbers::pi * f * static_cast<double>(t) / static_cast<double>(T) + 0.3 * static_cast<double>(r));
            }
        }
    }
    return m;
}

}  // namespace

TEST_CASE("mean representation") {
    const auto rep = transform_mean(make_dataset(Matrix{{1, 2, 3}, {4, 4, 4}}));
    CHECK(rep.dimension() == 1);
    CHECK(rep.features(0, 0) == 2.0);
    CHECK(rep.features(1, 0) == 4.0);
    CHECK(error_code_of([&] { reconstruct(rep); }) == Errc::basis_absent);

    SyntheticSpec spec;
    spec.scenario_shape_amplitude = 0;
    spec.noise_std = 0;
    spec.n_scenarios = 4;
    spec.length = 32;
    const auto truth = generate_synthetic_with_truth(spec);
    const auto feats = transform_mean(truth.dataset).features;
    for (std::size_t i = 0; i < truth.dataset.size(); ++i) {
        const auto loc = static_cast<std::size_t>(truth.dataset.info(i).location_id);
        CHECK(feats(static_cast<Eigen::Index>(i), 0) == doctest::Approx(truth.location_means[loc]).epsilon(1e-12));
    }

    const auto centered = transform_mean(center_global(truth.dataset));
    CHECK(std::abs(centered.features.sum()) < 1e-9 * static_cast<double>(truth.dataset.size()));
}

TEST_CASE("Haar kernel") {
    SUBCASE("constant series has only the approximation") {
        std::vector<double> x(16, 2.5);
        const auto c = haar_coefficients(x);
        CHECK(c[0] == doctest::Approx(2.5 * 4.0));
        for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] == 0.0);
    }
    SUBCASE("forward then inverse is the identity") {
        std::mt19937_64 rng(3);
        auto x = oracle::random_series(rng, 32);
        auto y = x;
        haar_forward(y);
        haar_inverse(y);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-13));
    }
    SUBCASE("Parseval on random 16-sample series") {
        std::mt19937_64 rng(11);
        for (int rep = 0; rep < 20; ++rep) {
            const auto x = oracle::random_series(rng, 16, 3.0);
            const auto c = haar_coefficients(x);
            const double ex = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
            const double ec = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
            CHECK(std::abs(ex - ec) < 1e-10 * std::max(1.0, ex));
        }
    }
    SUBCASE("non power of two pads") {
        CHECK(next_power_of_two(2160) == 4096);
        CHECK(next_power_of_two(16) == 16);
        CHECK(max_haar_level(2160) == 12);
        CHECK(max_haar_level(16) == 4);
        std::vector<double> x{1, 2, 3, 4, 5};
        CHECK(haar_coefficients(x).size() == 8);
    }
    SUBCASE("forward rejects non power of two") {
        std::vector<double> x(6, 1.0);
        CHECK(error_code_of([&] { haar_forward(x); }) == Errc::invalid_argument);
    }
}

TEST_CASE("Haar representation") {
    const auto ds = make_dataset(random_matrix(6, 20, 5, 2.0));

    SUBCASE("energy 1 keeps everything and reconstructs exactly") {
        const auto rep = transform_haar(ds, HaarMode::with_energy(1.0));
        CHECK(rep.dimension() == 32);
        CHECK(rep.transform_length == 32);
        const Matrix back = reconstruct(rep);
        CHECK((back - ds.values()).cwiseAbs().maxCoeff() < 1e-9);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const double e0 = ds.values().row(static_cast<Eigen::Index>(i)).squaredNorm();
            const double e1 = rep.features.row(static_cast<Eigen::Index>(i)).squaredNorm();
            CHECK(std::abs(e0 - e1) <= 1e-9 * e0);
        }
    }
    SUBCASE("energy threshold is met and minimal") {
        for (double alpha : {0.5, 0.8, 0.95, 0.99}) {
            const auto rep = transform_haar(ds, HaarMode::with_energy(alpha));
            CHECK(energy(rep.features) >= alpha * energy(ds.values()) * (1 - 1e-12));
            // Dropping the weakest kept position falls below the threshold.
            std::vector<double> col(rep.dimension());
            for (std::size_t j = 0; j < col.size(); ++j) col[j] = rep.features.col(static_cast<Eigen::Index>(j)).squaredNorm();
            const double weakest = *std::min_element(col.begin(), col.end());
            CHECK(energy(rep.features) - weakest < alpha * energy(ds.values()));
        }
    }
    SUBCASE("level nesting and level counts") {
        std::vector<std::size_t> prev;
        for (std::size_t L = 0; L <= max_haar_level(20); ++L) {
            const auto rep = transform_haar(ds, HaarMode::at_level(L));
            CHECK(rep.dimension() == (std::size_t{1} << L));
            CHECK(std::includes(rep.kept_positions.begin(), rep.kept_positions.end(), prev.begin(), prev.end()));
            prev = rep.kept_positions;
        }
        CHECK(error_code_of([&] { transform_haar(ds, HaarMode::at_level(6)); }) == Errc::invalid_argument);
    }
    SUBCASE("level 0 keeps the scaled mean") {
        const auto rep = transform_haar(ds, HaarMode::at_level(0));
        const auto m = moments(ds.series(2)).mean;
        CHECK(rep.features(2, 0) == doctest::Approx(std::sqrt(20.0) * m).epsilon(1e-12));
        const Matrix back = reconstruct(rep);
        CHECK(back(2, 7) == doctest::Approx(m).epsilon(1e-12));
    }
    SUBCASE("invalid energy") {
        CHECK(error_code_of([&] { transform_haar(ds, HaarMode::with_energy(0.0)); }) == Errc::invalid_argument);
        CHECK(error_code_of([&] { transform_haar(ds, HaarMode::with_energy(1.5)); }) == Errc::invalid_argument);
    }
    SUBCASE("parallel equals sequential") {
        const auto big = make_dataset(random_matrix(40, 100, 9));
        const auto a = transform_haar(big, HaarMode::with_energy(0.9), {1});
        const auto b = transform_haar(big, HaarMode::with_energy(0.9), {4});
        CHECK(a.features == b.features);
        CHECK(a.kept_positions == b.kept_positions);
    }
}

TEST_CASE("real spectrum matches a direct DFT") {
    std::mt19937_64 rng(21);
    for (std::size_t T : {7, 8, 30, 31}) {
        const auto x = oracle::random_series(rng, T);
        const auto spec = real_spectrum(x);
        const auto e = oracle::dft_energy(x);
        REQUIRE(spec.cos_part.size() == e.size());
        for (std::size_t k = 0; k < e.size(); ++k) {
            const double got = spec.cos_part[k] * spec.cos_part[k] + spec.sin_part[k] * spec.sin_part[k];
            CHECK(got == doctest::Approx(e[k]).epsilon(1e-10));
        }
    }
}

TEST_CASE("Fourier representation") {
    SUBCASE("strong frequency 1 plus weak frequency 7 keeps frequency 1 only") {
        const auto ds = make_dataset(sinusoids(64, {{10.0, 1.0}, {0.1, 7.0}}));
        const auto rep = transform_fourier(ds, 0.95);
        CHECK(rep.kept_positions == std::vector<std::size_t>{1});
        CHECK(rep.dimension() == 2);
    }
    SUBCASE("pure cosine keeps only its frequency below full energy") {
        Matrix m(2, 48);
        for (Eigen::Index t = 0; t < 48; ++t) {
            m(0, t) = std::cos(2 * std::numbers::pi * 5.0 * static_cast<double>(t) / 48.0);
            m(1, t) = 3 * m(0, t);
        }
        for (double alpha : {0.1, 0.5, 0.95, 0.999999}) {
            CHECK(transform_fourier(make_dataset(m), alpha).kept_positions == std::vector<std::size_t>{5});
        }
    }
    SUBCASE("alpha 1 reconstructs and preserves energy") {
        for (std::size_t T : {33, 64}) {
            const auto ds = make_dataset(random_matrix(5, T, T));
            const auto rep = transform_fourier(ds, 1.0);
            CHECK(rep.dimension() == T);
            CHECK((reconstruct(rep) - ds.values()).cwiseAbs().maxCoeff() < 1e-9);
            for (Eigen::Index i = 0; i < 5; ++i) {
                const double e0 = ds.values().row(i).squaredNorm();
                CHECK(std::abs(rep.features.row(i).squaredNorm() - e0) <= 1e-9 * e0);
            }
        }
    }
    SUBCASE("dimension counts DC and Nyquist once") {
        Matrix m(2, 8);
        for (Eigen::Index t = 0; t < 8; ++t) {
            m(0, t) = 1.0 + ((t % 2 == 0) ? 1.0 : -1.0);
            m(1, t) = 2.0 - ((t % 2 == 0) ? 1.0 : -1.0);
        }
        const auto rep = transform_fourier(make_dataset(m), 1.0 - 1e-9);
        CHECK(rep.kept_positions == std::vector<std::size_t>{0, 4});
        CHECK(rep.dimension() == 2);
    }
    SUBCASE("invalid alpha") {
        const auto ds = make_dataset(random_matrix(3, 8, 1));
        CHECK(error_code_of([&] { transform_fourier(ds, 0.0); }) == Errc::invalid_argument);
    }
}

TEST_CASE("PCA representation") {
    const double c = std::sqrt(0.5);
    const Matrix axes{{3, c, c}, {3, -c, -c}, {-3, c, -c}, {-3, -c, c}};

    SUBCASE("hand-built variances 9, 0.5, 0.5") {
        const auto ev = pca_eigenvalues(axes);
        REQUIRE(ev.size() >= 3);
        CHECK(ev[0] == doctest::Approx(9.0).epsilon(1e-12));
        CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(ev[2] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(transform_pca(make_dataset(axes), 0.9).dimension() == 1);
        CHECK(transform_pca(make_dataset(axes), 0.95).dimension() == 2);
        const auto full = transform_pca(make_dataset(axes), 1.0);
        CHECK(full.dimension() == 3);
        double share = 0;
        for (double e : full.eigenvalues) share += e / 10.0;
        CHECK(share == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("points on a line through the centroid") {
        Matrix m(5, 4);
        for (Eigen::Index i = 0; i < 5; ++i) m.row(i) = Eigen::RowVector4d(1, -2, 0.5, 3) * static_cast<double>(i - 2) + Eigen::RowVector4d(7, 7, 7, 7);
        for (double alpha : {0.1, 0.95, 1.0}) CHECK(transform_pca(make_dataset(m), alpha).dimension() == 1);
    }
    SUBCASE("reconstruction error equals N times dropped eigenvalues") {
        for (auto [n, t] : {std::pair<std::size_t, std::size_t>{12, 30}, {40, 10}}) {
            const auto ds = make_dataset(random_matrix(n, t, n * 100 + t));
            for (double alpha : {0.5, 0.8, 0.95}) {
                const auto rep = transform_pca(ds, alpha);
                double dropped = 0;
                for (std::size_t j = rep.dimension(); j < rep.eigenvalues.size(); ++j) dropped += rep.eigenvalues[j];
                const double err = (reconstruct(rep) - ds.values()).squaredNorm();
                CHECK(err == doctest::Approx(static_cast<double>(n) * dropped).epsilon(1e-6));
            }
        }
    }
    SUBCASE("scores are orthogonal") {
        const auto rep = transform_pca(make_dataset(random_matrix(15, 40, 77)), 0.99);
        const Matrix g = rep.features.transpose() * rep.features;
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.cols(); ++j) {
                if (i != j) CHECK(std::abs(g(i, j)) < 1e-8 * std::sqrt(g(i, i) * g(j, j)));
            }
        }
    }
    SUBCASE("Gram and covariance routes agree") {
        const Matrix wide = random_matrix(6, 20, 4);
        const Matrix tall = wide.transpose();
        const auto a = pca_eigenvalues(wide);
        const Matrix wt = wide;
        // Same nonzero spectrum for X and a copy padded with duplicate-free extra columns is not
        // guaranteed; instead compare against an explicit covariance eigen-solve.
        const Matrix centered = wt.rowwise() - wt.colwise().mean();
        const Matrix cov = centered.transpose() * centered / 6.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        auto ev = solver.eigenvalues();
        for (std::size_t j = 0; j < 5; ++j) CHECK(a[j] == doctest::Approx(ev(19 - static_cast<Eigen::Index>(j))).epsilon(1e-9));
        CHECK(pca_eigenvalues(tall).size() >= 5);
    }
    SUBCASE("zero variance is degenerate") {
        const Matrix same{{1, 2, 3}, {1, 2, 3}};
        CHECK(error_code_of([&] { transform_pca(make_dataset(same), 0.95); }) == Errc::degenerate_data);
    }
}

TEST_CASE("kept dimension is monotone in alpha") {
    const auto ds = make_dataset(random_matrix(10, 50, 123) + sinusoids(50, {{4, 2}, {2, 5}}, 10));
    std::size_t ph = 0, pf = 0, pp = 0;
    for (double alpha = 0.05; alpha <= 1.0 + 1e-12; alpha += 0.05) {
        const double a = std::min(alpha, 1.0);
        const auto h = transform_haar(ds, HaarMode::with_energy(a)).dimension();
        const auto f = transform_fourier(ds, a).dimension();
        const auto p = transform_pca(ds, a).dimension();
        CHECK(h >= ph);
        CHECK(f >= pf);
        CHECK(p >= pp);
        ph = h;
        pf = f;
        pp = p;
    }
}

TEST_CASE("energy selection ties go to the lower index") {
    CHECK(select_by_energy({1, 1, 1, 1}, 0.5) == std::vector<std::size_t>{0, 1});
    CHECK(select_by_energy({0, 2, 1, 2}, 0.4) == std::vector<std::size_t>{1});
    CHECK(select_by_energy({0, 2, 1, 2}, 0.6) == std::vector<std::size_t>{1, 3});
    CHECK(select_by_energy({0, 2, 1, 2}, 1.0) == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("basis matrix reproduces reconstruction") {
    const auto ds = make_dataset(random_matrix(5, 12, 8));
    for (const auto& rep : {transform_haar(ds, HaarMode::with_energy(0.8)), transform_fourier(ds, 0.8), transform_pca(ds, 0.8)}) {
        Matrix via = rep.features * basis_matrix(rep);
        if (rep.offset) via.rowwise() += rep.offset->transpose();
        CHECK((via - reconstruct(rep)).cwiseAbs().maxCoeff() < 1e-10);
    }
}
