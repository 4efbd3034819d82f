#include "scenclust/transforms.hpp"

#include "parallel.hpp"
#include "scenclust/error.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>

namespace scenclust {

std::string_view to_string(RepresentationKind kind) {
    switch (kind) {
        case RepresentationKind::mean: return "mean";
        case RepresentationKind::haar_level: return "haar_level";
        case RepresentationKind::haar_energy: return "haar_energy";
        case RepresentationKind::fourier_energy: return "fourier_energy";
        case RepresentationKind::pca: return "pca";
        case RepresentationKind::identity: return "identity";
        case RepresentationKind::zscore: return "zscore";
    }
    return "identity";
}

RepresentationKind representation_kind_from_string(std::string_view name) {
    for (auto kind : {RepresentationKind::mean, RepresentationKind::haar_level, RepresentationKind::haar_energy,
                      RepresentationKind::fourier_energy, RepresentationKind::pca, RepresentationKind::identity,
                      RepresentationKind::zscore}) {
        if (to_string(kind) == name) return kind;
    }
    fail(Errc::invalid_argument, fmt::format("unknown representation '{}'", name));
}

bool Representation::has_basis() const {
    switch (kind) {
        case RepresentationKind::haar_level:
        case RepresentationKind::haar_energy:
        case RepresentationKind::fourier_energy: return true;
        case RepresentationKind::pca: return basis.has_value();
        default: return false;
    }
}

Representation transform_mean(const Dataset& ds) {
    Representation rep;
    rep.kind = RepresentationKind::mean;
    rep.series_length = ds.length();
    rep.features = ds.values().rowwise().mean();
    return rep;
}

Representation transform_identity(const Dataset& ds) {
    Representation rep;
    rep.kind = RepresentationKind::identity;
    rep.series_length = ds.length();
    rep.transform_length = ds.length();
    rep.features = ds.values();
    return rep;
}

namespace {

/// Cumulative share reached, allowing for rounding in the running sum.
bool reached(double acc, double alpha, double total) { return acc >= alpha * total * (1.0 - 1e-12); }

}  // namespace

std::vector<std::size_t> select_by_energy(const std::vector<double>& energy, double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, Errc::invalid_argument,
            fmt::format("energy fraction must lie in (0, 1], got {}", alpha));
    std::vector<std::size_t> order(energy.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (alpha >= 1.0) return order;

    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energy[a] > energy[b]; });
    const double total = std::accumulate(energy.begin(), energy.end(), 0.0);
    std::vector<std::size_t> kept;
    double acc = 0.0;
    for (std::size_t pos : order) {
        kept.push_back(pos);
        acc += energy[pos];
        if (reached(acc, alpha, total)) break;
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

namespace {

Matrix gather_columns(const Matrix& full, const std::vector<std::size_t>& columns) {
    Matrix out(full.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out.col(static_cast<Eigen::Index>(c)) = full.col(static_cast<Eigen::Index>(columns[c]));
    }
    return out;
}

std::vector<double> column_energy(const Matrix& m) {
    std::vector<double> e(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) e[static_cast<std::size_t>(c)] = m.col(c).squaredNorm();
    return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Haar

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::size_t max_haar_level(std::size_t T) {
    std::size_t level = 0;
    while ((std::size_t{1} << level) < T) ++level;
    return level;
}

void haar_forward(std::span<double> x) {
    const std::size_t n = x.size();
    require(n > 0 && (n & (n - 1)) == 0, Errc::invalid_argument, "Haar transform needs a power-of-two length");
    std::vector<double> tmp(n);
    const double s = std::sqrt(0.5);
    for (std::size_t len = n; len > 1; len /= 2) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) {
            tmp[i] = (x[2 * i] + x[2 * i + 1]) * s;
            tmp[half + i] = (x[2 * i] - x[2 * i + 1]) * s;
        }
        std::copy_n(tmp.begin(), len, x.begin());
    }
}

void haar_inverse(std::span<double> x) {
    const std::size_t n = x.size();
    require(n > 0 && (n & (n - 1)) == 0, Errc::invalid_argument, "Haar transform needs a power-of-two length");
    std::vector<double> tmp(n);
    const double s = std::sqrt(0.5);
    for (std::size_t len = 2; len <= n; len *= 2) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) {
            tmp[2 * i] = (x[i] + x[half + i]) * s;
            tmp[2 * i + 1] = (x[i] - x[half + i]) * s;
        }
        std::copy_n(tmp.begin(), len, x.begin());
    }
}

std::vector<double> haar_coefficients(Series x) {
    const std::size_t T = x.size();
    const std::size_t M = next_power_of_two(T);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(T);
    std::vector<double> buf(M, 0.0);
    for (std::size_t t = 0; t < T; ++t) buf[t] = x[t] - mean;
    haar_forward(buf);
    buf[0] = std::sqrt(static_cast<double>(T)) * mean;
    return buf;
}

Representation transform_haar(const Dataset& ds, HaarMode mode, Parallelism par) {
    const std::size_t T = ds.length();
    const std::size_t M = next_power_of_two(T);
    if (mode.kind == HaarMode::Kind::level) {
        require(mode.level <= max_haar_level(T), Errc::invalid_argument,
                fmt::format("Haar level {} exceeds the maximum {} for T={}", mode.level, max_haar_level(T), T));
    } else {
        require(mode.energy > 0.0 && mode.energy <= 1.0, Errc::invalid_argument,
                fmt::format("Haar energy fraction must lie in (0, 1], got {}", mode.energy));
    }

    const auto N = static_cast<Eigen::Index>(ds.size());
    Matrix coeffs(N, static_cast<Eigen::Index>(M));
#pragma omp parallel for schedule(static) num_threads(detail::thread_count(par))
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto c = haar_coefficients(ds.series(static_cast<std::size_t>(i)));
        std::copy(c.begin(), c.end(), coeffs.row(i).data());
    }

    Representation rep;
    rep.series_length = T;
    rep.transform_length = M;
    if (mode.kind == HaarMode::Kind::level) {
        rep.kind = RepresentationKind::haar_level;
        rep.params["level"] = static_cast<double>(mode.level);
        rep.kept_positions.resize(std::size_t{1} << mode.level);
        std::iota(rep.kept_positions.begin(), rep.kept_positions.end(), std::size_t{0});
    } else {
        rep.kind = RepresentationKind::haar_energy;
        rep.params["energy"] = mode.energy;
        rep.kept_positions = select_by_energy(column_energy(coeffs), mode.energy);
    }
    rep.params["padded_length"] = static_cast<double>(M);
    rep.features = gather_columns(coeffs, rep.kept_positions);
    return rep;
}

// ---------------------------------------------------------------------------
// Fourier

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Real-to-complex and complex-to-real plans for one length. Planning is
/// serialized; executing with per-call buffers is thread safe.
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        auto* in = fftw_alloc_real(n);
        auto* out = fftw_alloc_complex(n / 2 + 1);
        {
            std::lock_guard lock(fftw_planner_mutex());
            const int len = static_cast<int>(n);
            forward_ = fftw_plan_dft_r2c_1d(len, in, out, FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_c2r_1d(len, out, in, FFTW_ESTIMATE);
        }
        fftw_free(in);
        fftw_free(out);
        require(forward_ != nullptr && backward_ != nullptr, Errc::invalid_argument, "FFTW planning failed");
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    RealSpectrum forward(Series x) const {
        Buffers b(n_);
        std::copy(x.begin(), x.end(), b.real);
        fftw_execute_dft_r2c(forward_, b.real, b.complex);
        const std::size_t nf = n_ / 2 + 1;
        const double inv_root = 1.0 / std::sqrt(static_cast<double>(n_));
        const double pair_scale = std::sqrt(2.0 / static_cast<double>(n_));
        RealSpectrum s{std::vector<double>(nf), std::vector<double>(nf, 0.0)};
        for (std::size_t k = 0; k < nf; ++k) {
            if (is_single(k)) {
                s.cos_part[k] = b.complex[k][0] * inv_root;
            } else {
                s.cos_part[k] = b.complex[k][0] * pair_scale;
                s.sin_part[k] = -b.complex[k][1] * pair_scale;
            }
        }
        return s;
    }

    std::vector<double> inverse(const RealSpectrum& s) const {
        Buffers b(n_);
        const std::size_t nf = n_ / 2 + 1;
        const double root = std::sqrt(static_cast<double>(n_));
        const double pair_scale = std::sqrt(static_cast<double>(n_) / 2.0);
        for (std::size_t k = 0; k < nf; ++k) {
            if (is_single(k)) {
                b.complex[k][0] = s.cos_part[k] * root;
                b.complex[k][1] = 0.0;
            } else {
                b.complex[k][0] = s.cos_part[k] * pair_scale;
                b.complex[k][1] = -s.sin_part[k] * pair_scale;
            }
        }
        fftw_execute_dft_c2r(backward_, b.complex, b.real);
        std::vector<double> x(b.real, b.real + n_);
        for (double& v : x) v /= static_cast<double>(n_);
        return x;
    }

    bool is_single(std::size_t k) const { return k == 0 || (n_ % 2 == 0 && k == n_ / 2); }

private:
    struct Buffers {
        explicit Buffers(std::size_t n) : real(fftw_alloc_real(n)), complex(fftw_alloc_complex(n / 2 + 1)) {}
        Buffers(const Buffers&) = delete;
        Buffers& operator=(const Buffers&) = delete;
        ~Buffers() {
            fftw_free(real);
            fftw_free(complex);
        }
        double* real;
        fftw_complex* complex;
    };

    std::size_t n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace

RealSpectrum real_spectrum(Series x) { return RealFft(x.size()).forward(x); }

Representation transform_fourier(const Dataset& ds, double alpha, Parallelism par) {
    require(alpha > 0.0 && alpha <= 1.0, Errc::invalid_argument,
            fmt::format("Fourier energy fraction must lie in (0, 1], got {}", alpha));
    const std::size_t T = ds.length();
    const std::size_t nf = T / 2 + 1;
    const auto N = static_cast<Eigen::Index>(ds.size());
    const RealFft fft(T);

    Matrix cos_part(N, static_cast<Eigen::Index>(nf)), sin_part(N, static_cast<Eigen::Index>(nf));
#pragma omp parallel for schedule(static) num_threads(detail::thread_count(par))
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto s = fft.forward(ds.series(static_cast<std::size_t>(i)));
        std::copy(s.cos_part.begin(), s.cos_part.end(), cos_part.row(i).data());
        std::copy(s.sin_part.begin(), s.sin_part.end(), sin_part.row(i).data());
    }

    std::vector<double> energy(nf);
    for (std::size_t k = 0; k < nf; ++k) {
        const auto c = static_cast<Eigen::Index>(k);
        energy[k] = cos_part.col(c).squaredNorm() + sin_part.col(c).squaredNorm();
    }

    Representation rep;
    rep.kind = RepresentationKind::fourier_energy;
    rep.series_length = T;
    rep.transform_length = T;
    rep.params["energy"] = alpha;
    rep.kept_positions = select_by_energy(energy, alpha);

    std::size_t p = 0;
    for (std::size_t k : rep.kept_positions) p += fft.is_single(k) ? 1 : 2;
    rep.features.resize(N, static_cast<Eigen::Index>(p));
    Eigen::Index col = 0;
    for (std::size_t k : rep.kept_positions) {
        const auto c = static_cast<Eigen::Index>(k);
        rep.features.col(col++) = cos_part.col(c);
        if (!fft.is_single(k)) rep.features.col(col++) = sin_part.col(c);
    }
    rep.params["frequencies"] = static_cast<double>(rep.kept_positions.size());
    return rep;
}

// ---------------------------------------------------------------------------
// PCA

namespace {

struct PcaFit {
    std::vector<double> eigenvalues;  // covariance, descending, clamped at 0
    Matrix directions;                // rank x T
    Matrix scores;                    // N x rank
    Vector column_means;
};

/// Sign convention: the largest-magnitude entry of each direction is positive.
void orient(Eigen::Ref<Vector> direction, Eigen::Ref<Vector> score) {
    Eigen::Index arg = 0;
    direction.cwiseAbs().maxCoeff(&arg);
    if (direction(arg) < 0) {
        direction = -direction;
        score = -score;
    }
}

PcaFit fit_pca(const Matrix& x) {
    const Eigen::Index N = x.rows(), T = x.cols();
    PcaFit fit;
    fit.column_means = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - fit.column_means.transpose();

    Eigen::VectorXd values;
    Eigen::MatrixXd directions;  // T x m, columns
    Eigen::MatrixXd scores;      // N x m
    if (N < T) {
        // Gram route: eigenvectors u of Xc Xc^T give directions Xc^T u / sqrt(lambda).
        const Eigen::MatrixXd gram = centered * centered.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        require(solver.info() == Eigen::Success, Errc::degenerate_data, "PCA eigen-decomposition failed");
        values = solver.eigenvalues().reverse() / static_cast<double>(N);
        const Eigen::MatrixXd u = solver.eigenvectors().rowwise().reverse();
        directions = Eigen::MatrixXd::Zero(T, N);
        scores = Eigen::MatrixXd::Zero(N, N);
        const double top = std::max(values(0), 0.0);
        for (Eigen::Index k = 0; k < N; ++k) {
            if (values(k) <= 1e-12 * top) continue;
            const double root = std::sqrt(values(k) * static_cast<double>(N));
            directions.col(k) = centered.transpose() * u.col(k) / root;
            scores.col(k) = u.col(k) * root;
        }
    } else {
        const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(N);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        require(solver.info() == Eigen::Success, Errc::degenerate_data, "PCA eigen-decomposition failed");
        values = solver.eigenvalues().reverse();
        directions = solver.eigenvectors().rowwise().reverse();
        scores = centered * directions;
    }

    const double top = std::max(values(0), 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double v = std::max(values(k), 0.0);
        fit.eigenvalues.push_back(v);
        if (v > 1e-12 * top) rank = k + 1;
    }
    fit.directions.resize(rank, T);
    fit.scores.resize(N, rank);
    for (Eigen::Index k = 0; k < rank; ++k) {
        Vector d = directions.col(k);
        Vector s = scores.col(k);
        orient(d, s);
        fit.directions.row(k) = d.transpose();
        fit.scores.col(k) = s;
    }
    return fit;
}

}  // namespace

std::vector<double> pca_eigenvalues(const Matrix& x) { return fit_pca(x).eigenvalues; }

Representation transform_pca(const Dataset& ds, double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, Errc::invalid_argument,
            fmt::format("PCA variance fraction must lie in (0, 1], got {}", alpha));
    auto fit = fit_pca(ds.values());
    const double total = std::accumulate(fit.eigenvalues.begin(), fit.eigenvalues.end(), 0.0);
    require(total > 0.0 && fit.directions.rows() > 0, Errc::degenerate_data, "PCA on data with zero total variance");

    const auto rank = static_cast<std::size_t>(fit.directions.rows());
    std::size_t p = rank;
    if (alpha < 1.0) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rank; ++k) {
            acc += fit.eigenvalues[k];
            if (reached(acc, alpha, total)) {
                p = k + 1;
                break;
            }
        }
    }

    Representation rep;
    rep.kind = RepresentationKind::pca;
    rep.series_length = ds.length();
    rep.transform_length = ds.length();
    rep.params["variance"] = alpha;
    rep.params["components"] = static_cast<double>(p);
    rep.kept_positions.resize(p);
    std::iota(rep.kept_positions.begin(), rep.kept_positions.end(), std::size_t{0});
    const auto pp = static_cast<Eigen::Index>(p);
    rep.features = fit.scores.leftCols(pp);
    rep.basis = Matrix(fit.directions.topRows(pp));
    rep.offset = fit.column_means;
    rep.eigenvalues = std::move(fit.eigenvalues);
    return rep;
}

// ---------------------------------------------------------------------------
// Reconstruction

Matrix reconstruct(const Representation& rep) {
    require(rep.has_basis(), Errc::basis_absent,
            fmt::format("representation '{}' has no basis to reconstruct from", to_string(rep.kind)));
    const Eigen::Index N = rep.features.rows();
    const auto T = static_cast<Eigen::Index>(rep.series_length);
    Matrix out(N, T);

    switch (rep.kind) {
        case RepresentationKind::pca: {
            out = rep.features * (*rep.basis);
            out.rowwise() += rep.offset->transpose();
            break;
        }
        case RepresentationKind::haar_level:
        case RepresentationKind::haar_energy: {
            const double root = std::sqrt(static_cast<double>(rep.series_length));
            for (Eigen::Index i = 0; i < N; ++i) {
                std::vector<double> buf(rep.transform_length, 0.0);
                for (std::size_t c = 0; c < rep.kept_positions.size(); ++c) {
                    buf[rep.kept_positions[c]] = rep.features(i, static_cast<Eigen::Index>(c));
                }
                const double mean = buf[0] / root;
                buf[0] = 0.0;
                haar_inverse(buf);
                for (Eigen::Index t = 0; t < T; ++t) out(i, t) = buf[static_cast<std::size_t>(t)] + mean;
            }
            break;
        }
        case RepresentationKind::fourier_energy: {
            const RealFft fft(rep.series_length);
            const std::size_t nf = rep.series_length / 2 + 1;
            for (Eigen::Index i = 0; i < N; ++i) {
                RealSpectrum s{std::vector<double>(nf, 0.0), std::vector<double>(nf, 0.0)};
                Eigen::Index col = 0;
                for (std::size_t k : rep.kept_positions) {
                    s.cos_part[k] = rep.features(i, col++);
                    if (!fft.is_single(k)) s.sin_part[k] = rep.features(i, col++);
                }
                const auto x = fft.inverse(s);
                std::copy(x.begin(), x.end(), out.row(i).data());
            }
            break;
        }
        default: fail(Errc::basis_absent, "representation has no basis");
    }
    return out;
}

Matrix basis_matrix(const Representation& rep) {
    require(rep.has_basis(), Errc::basis_absent,
            fmt::format("representation '{}' has no basis", to_string(rep.kind)));
    if (rep.kind == RepresentationKind::pca) return *rep.basis;
    // Each atom is the reconstruction of a unit feature vector.
    Representation unit = rep;
    const auto p = static_cast<Eigen::Index>(rep.dimension());
    unit.features = Matrix::Identity(p, p);
    return reconstruct(unit);
}

// ---------------------------------------------------------------------------

std::string RepresentationSpec::label() const {
    switch (kind) {
        case RepresentationKind::mean: return "mean";
        case RepresentationKind::haar_level: return fmt::format("haar_level{}", haar_level);
        case RepresentationKind::haar_energy: return fmt::format("haar{:g}", alpha * 100);
        case RepresentationKind::fourier_energy: return fmt::format("fourier{:g}", alpha * 100);
        case RepresentationKind::pca: return fmt::format("pca{:g}", alpha * 100);
        case RepresentationKind::identity: return "identity";
        case RepresentationKind::zscore: return "zscore";
    }
    return "identity";
}

Representation make_representation(const Dataset& ds, const RepresentationSpec& spec, Parallelism par) {
    switch (spec.kind) {
        case RepresentationKind::mean: return transform_mean(ds);
        case RepresentationKind::haar_level: return transform_haar(ds, HaarMode::at_level(spec.haar_level), par);
        case RepresentationKind::haar_energy: return transform_haar(ds, HaarMode::with_energy(spec.alpha), par);
        case RepresentationKind::fourier_energy: return transform_fourier(ds, spec.alpha, par);
        case RepresentationKind::pca: return transform_pca(ds, spec.alpha);
        case RepresentationKind::identity: return transform_identity(ds);
        case RepresentationKind::zscore: {
            auto rep = transform_identity(zscore(ds));
            rep.kind = RepresentationKind::zscore;
            return rep;
        }
    }
    fail(Errc::invalid_argument, "unknown representation kind");
}

}  // namespace scenclust
