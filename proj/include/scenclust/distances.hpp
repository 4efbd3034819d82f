#pragma once

#include "scenclust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace scenclust {

enum class DistanceKind { l2, mlpc, dtw, dtw_banded };
enum class DtwCost { squared, absolute };

std::string_view to_string(DistanceKind kind);
std::string_view to_string(DtwCost cost);
DistanceKind distance_kind_from_string(std::string_view name);

struct DistanceSpec {
    DistanceKind kind = DistanceKind::l2;
    /// Maximum lag for MLPC (samples).
    std::size_t k_max = 240;
    /// Sakoe-Chiba half-width for dtw_banded. Unset means ceil(0.1 * T).
    std::optional<std::size_t> band;
    DtwCost cost = DtwCost::squared;
    /// MLPC variant: zero-padded normalized cross-correlation instead of
    /// per-lag overlap Pearson correlation. For comparison only.
    bool mlpc_zero_padded = false;

    std::string label() const;
    bool operator==(const DistanceSpec&) const = default;
};

std::size_t default_band(std::size_t T);

double dist_l2(Series z, Series w);

/// Pearson correlation of z[t + lag] against w[t] over their overlap.
/// Throws zero_variance if either overlapping segment is constant.
double lagged_correlation(Series z, Series w, std::ptrdiff_t lag);

/// 1 - max over |k| <= k_max of the overlap Pearson correlation. In [0, 2].
double dist_mlpc(Series z, Series w, std::size_t k_max);

/// 1 - max over |k| <= k_max of cross-correlation with zero padding,
/// normalized by ||z|| ||w||.
double dist_mlpc_zero_padded(Series z, Series w, std::size_t k_max);

/// Three-step DTW (steps (1,0), (0,1), (1,1)). With `band`, only cells with
/// |i - j| <= band are allowed. Squared cost returns sqrt(path cost).
double dist_dtw(Series z, Series w, DtwCost cost = DtwCost::squared, std::optional<std::size_t> band = std::nullopt);

double distance(Series z, Series w, const DistanceSpec& spec);

/// Throws if `spec` cannot be applied to rows of length p.
void check_applicable(const DistanceSpec& spec, std::size_t p);

/// Symmetric N x N matrix of pairwise distances with zero diagonal.
struct DistanceMatrix {
    DistanceSpec spec;
    Matrix values;

    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

/// Computes every pair once (i < j) and mirrors it. Results do not depend on
/// the thread count.
DistanceMatrix distance_matrix(const Matrix& x, const DistanceSpec& spec, Parallelism par = {});

/// Plain CSV: N rows of N comma-separated values, no header.
void write_distance_csv(const DistanceMatrix& d, const std::filesystem::path& path);
Matrix read_distance_csv(const std::filesystem::path& path);

/// Binary lower triangle; see docs/formats.md.
std::uint32_t distance_kind_code(DistanceKind kind);
void write_distance_binary(const DistanceMatrix& d, const std::filesystem::path& path);
DistanceMatrix read_distance_binary(const std::filesystem::path& path);

}  // namespace scenclust
