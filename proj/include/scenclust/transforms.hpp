#pragma once

#include "scenclust/dataset.hpp"
#include "scenclust/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenclust {

enum class RepresentationKind { mean, haar_level, haar_energy, fourier_energy, pca, identity, zscore };

std::string_view to_string(RepresentationKind kind);
RepresentationKind representation_kind_from_string(std::string_view name);

/// A dataset mapped into a common feature space (N x p).
struct Representation {
    RepresentationKind kind = RepresentationKind::identity;
    Matrix features;
    std::map<std::string, double> params;

    /// Original series length T.
    std::size_t series_length = 0;
    /// Haar: padded length (next power of two). Fourier: T.
    std::size_t transform_length = 0;
    /// Coefficient slots kept, ascending. Haar: positions in the padded
    /// transform. Fourier: frequency indices. PCA: component indices.
    std::vector<std::size_t> kept_positions;

    /// PCA only: principal directions (p x T) and column means (T).
    std::optional<Matrix> basis;
    std::optional<Vector> offset;
    /// PCA only: all covariance eigenvalues, descending.
    std::vector<double> eigenvalues;

    std::size_t dimension() const { return static_cast<std::size_t>(features.cols()); }
    bool has_basis() const;
};

/// p = 1; feature = record mean.
Representation transform_mean(const Dataset& ds);

/// p = T; features are the series themselves.
Representation transform_identity(const Dataset& ds);

// --- Haar -----------------------------------------------------------------

/// In-place orthonormal Haar analysis of a power-of-two length buffer.
/// Output layout is coarse to fine: [approx, level-1 detail, 2 level-2 details, ...].
void haar_forward(std::span<double> x);
void haar_inverse(std::span<double> x);

std::size_t next_power_of_two(std::size_t n);
/// ceil(log2(T)); the finest Haar level available for length T.
std::size_t max_haar_level(std::size_t T);

/// Haar coefficients of one record. The series is centered on its own
/// mean, zero padded to the next power of two and transformed; slot 0
/// (the approximation, which is zero after centering) is replaced by
/// sqrt(T) * mean so the map stays orthonormal and the mean is preserved.
std::vector<double> haar_coefficients(Series x);

struct HaarMode {
    enum class Kind { level, energy } kind = Kind::energy;
    std::size_t level = 0;
    double energy = 0.95;

    static HaarMode at_level(std::size_t level) { return {Kind::level, level, 0.0}; }
    static HaarMode with_energy(double alpha) { return {Kind::energy, 0, alpha}; }
};

Representation transform_haar(const Dataset& ds, HaarMode mode, Parallelism par = {});

// --- Fourier ----------------------------------------------------------------

/// Orthonormal real Fourier coefficients per frequency index 0..T/2:
/// DC and (even T) Nyquist have one coefficient, others a (cos, sin) pair.
struct RealSpectrum {
    std::vector<double> cos_part;  // size T/2 + 1
    std::vector<double> sin_part;  // size T/2 + 1; zero at DC and Nyquist
};

RealSpectrum real_spectrum(Series x);

Representation transform_fourier(const Dataset& ds, double alpha, Parallelism par = {});

// --- PCA --------------------------------------------------------------------

/// Population covariance eigenvalues (descending) of the column-centered N x T matrix.
std::vector<double> pca_eigenvalues(const Matrix& x);

Representation transform_pca(const Dataset& ds, double alpha);

// --- Common -----------------------------------------------------------------

/// Smallest set of positions whose summed energy reaches `alpha` of the total.
/// Positions are taken by decreasing energy, ties by lower index; alpha = 1
/// keeps every position. Result is sorted ascending.
std::vector<std::size_t> select_by_energy(const std::vector<double>& energy, double alpha);

/// Inverse map using only the kept coefficients (N x T).
Matrix reconstruct(const Representation& rep);

/// Kept atoms as rows of a p x T matrix, so reconstruct == features * basis (+ offset).
Matrix basis_matrix(const Representation& rep);

/// Description of a representation to build, as used by pipelines and the CLI.
struct RepresentationSpec {
    RepresentationKind kind = RepresentationKind::identity;
    std::size_t haar_level = 4;
    double alpha = 0.95;

    std::string label() const;
};

Representation make_representation(const Dataset& ds, const RepresentationSpec& spec, Parallelism par = {});

}  // namespace scenclust
