#include "scenclust/distances.hpp"

#include "parallel.hpp"
#include "scenclust/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace scenclust {

std::string_view to_string(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::l2: return "l2";
        case DistanceKind::mlpc: return "mlpc";
        case DistanceKind::dtw: return "dtw";
        case DistanceKind::dtw_banded: return "dtw_banded";
    }
    return "l2";
}

std::string_view to_string(DtwCost cost) { return cost == DtwCost::squared ? "squared" : "absolute"; }

DistanceKind distance_kind_from_string(std::string_view name) {
    for (auto kind : {DistanceKind::l2, DistanceKind::mlpc, DistanceKind::dtw, DistanceKind::dtw_banded}) {
        if (to_string(kind) == name) return kind;
    }
    fail(Errc::invalid_argument, fmt::format("unknown distance '{}'", name));
}

std::string DistanceSpec::label() const {
    switch (kind) {
        case DistanceKind::l2: return "l2";
        case DistanceKind::mlpc: return fmt::format("mlpc(k_max={}{})", k_max, mlpc_zero_padded ? ",zero_padded" : "");
        case DistanceKind::dtw: return fmt::format("dtw({})", to_string(cost));
        case DistanceKind::dtw_banded:
            return band ? fmt::format("dtw_banded({},band={})", to_string(cost), *band)
                        : fmt::format("dtw_banded({},band=auto)", to_string(cost));
    }
    return "l2";
}

std::size_t default_band(std::size_t T) { return (T + 9) / 10; }

double dist_l2(Series z, Series w) {
    require(z.size() == w.size(), Errc::length_mismatch,
            fmt::format("L2 needs equal lengths, got {} and {}", z.size(), w.size()));
    double ss = 0.0;
    for (std::size_t t = 0; t < z.size(); ++t) {
        const double d = z[t] - w[t];
        ss += d * d;
    }
    return std::sqrt(ss);
}

namespace {

std::vector<double> prefix_sums(Series x) {
    std::vector<double> p(x.size() + 1, 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) p[t + 1] = p[t] + x[t];
    return p;
}

bool is_flat(double centered_ss, double mean, std::size_t n) {
    return centered_ss <= 1e-20 * static_cast<double>(n) * mean * mean;
}

/// Overlap segments for z[t + lag] vs w[t].
struct Overlap {
    std::size_t z_begin, w_begin, n;
};

Overlap overlap_at(std::size_t T, std::ptrdiff_t lag) {
    const auto shift = static_cast<std::size_t>(lag < 0 ? -lag : lag);
    return lag >= 0 ? Overlap{shift, 0, T - shift} : Overlap{0, shift, T - shift};
}

double correlation_with_prefix(Series z, Series w, const std::vector<double>& pz, const std::vector<double>& pw,
                               std::ptrdiff_t lag) {
    const auto o = overlap_at(z.size(), lag);
    const double n = static_cast<double>(o.n);
    const double mz = (pz[o.z_begin + o.n] - pz[o.z_begin]) / n;
    const double mw = (pw[o.w_begin + o.n] - pw[o.w_begin]) / n;
    const double* a = z.data() + o.z_begin;
    const double* b = w.data() + o.w_begin;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t t = 0; t < o.n; ++t) {
        const double da = a[t] - mz;
        const double db = b[t] - mw;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (is_flat(saa, mz, o.n) || is_flat(sbb, mw, o.n)) {
        fail(Errc::zero_variance, fmt::format("constant overlap segment at lag {}", lag));
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void check_mlpc_lengths(std::size_t nz, std::size_t nw, std::size_t k_max) {
    require(nz == nw, Errc::length_mismatch, fmt::format("MLPC needs equal lengths, got {} and {}", nz, nw));
    require(k_max < nz && nz - k_max >= 3, Errc::invalid_argument,
            fmt::format("MLPC k_max={} leaves fewer than 3 overlapping samples for T={}", k_max, nz));
}

}  // namespace

double lagged_correlation(Series z, Series w, std::ptrdiff_t lag) {
    require(z.size() == w.size(), Errc::length_mismatch, "lagged correlation needs equal lengths");
    const auto shift = static_cast<std::size_t>(lag < 0 ? -lag : lag);
    require(shift < z.size() && z.size() - shift >= 2, Errc::invalid_argument,
            fmt::format("lag {} leaves fewer than 2 overlapping samples", lag));
    return correlation_with_prefix(z, w, prefix_sums(z), prefix_sums(w), lag);
}

double dist_mlpc(Series z, Series w, std::size_t k_max) {
    check_mlpc_lengths(z.size(), w.size(), k_max);
    const auto pz = prefix_sums(z);
    const auto pw = prefix_sums(w);
    const auto kmax = static_cast<std::ptrdiff_t>(k_max);
    double best = -1.0;
    for (std::ptrdiff_t k = -kmax; k <= kmax; ++k) best = std::max(best, correlation_with_prefix(z, w, pz, pw, k));
    return std::clamp(1.0 - best, 0.0, 2.0);
}

double dist_mlpc_zero_padded(Series z, Series w, std::size_t k_max) {
    check_mlpc_lengths(z.size(), w.size(), k_max);
    double nz = 0.0, nw = 0.0;
    for (double v : z) nz += v * v;
    for (double v : w) nw += v * v;
    require(nz > 0.0 && nw > 0.0, Errc::zero_variance, "zero-padded MLPC on an all-zero series");
    const double norm = std::sqrt(nz * nw);
    const auto kmax = static_cast<std::ptrdiff_t>(k_max);
    double best = -1.0;
    for (std::ptrdiff_t k = -kmax; k <= kmax; ++k) {
        const auto o = overlap_at(z.size(), k);
        double s = 0.0;
        for (std::size_t t = 0; t < o.n; ++t) s += z[o.z_begin + t] * w[o.w_begin + t];
        best = std::max(best, s / norm);
    }
    return std::clamp(1.0 - best, 0.0, 2.0);
}

double dist_dtw(Series z, Series w, DtwCost cost, std::optional<std::size_t> band) {
    require(!z.empty() && !w.empty(), Errc::invalid_argument, "DTW needs non-empty series");
    const std::size_t n = z.size(), m = w.size();
    const std::size_t diff = n > m ? n - m : m - n;
    const std::size_t b = band.value_or(std::max(n, m));
    require(diff <= b, Errc::invalid_argument,
            fmt::format("DTW band {} is smaller than the length difference {}", b, diff));

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t lo = i > b ? i - b : 1;
        const std::size_t hi = std::min(m, i + b);
        cur[lo - 1] = inf;
        const double zi = z[i - 1];
        for (std::size_t j = lo; j <= hi; ++j) {
            const double d = zi - w[j - 1];
            const double c = cost == DtwCost::squared ? d * d : std::abs(d);
            cur[j] = c + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        if (hi < m) cur[hi + 1] = inf;
        std::swap(prev, cur);
    }
    const double total = prev[m];
    return cost == DtwCost::squared ? std::sqrt(total) : total;
}

double distance(Series z, Series w, const DistanceSpec& spec) {
    switch (spec.kind) {
        case DistanceKind::l2: return dist_l2(z, w);
        case DistanceKind::mlpc:
            return spec.mlpc_zero_padded ? dist_mlpc_zero_padded(z, w, spec.k_max) : dist_mlpc(z, w, spec.k_max);
        case DistanceKind::dtw: return dist_dtw(z, w, spec.cost);
        case DistanceKind::dtw_banded:
            return dist_dtw(z, w, spec.cost, spec.band.value_or(default_band(std::max(z.size(), w.size()))));
    }
    fail(Errc::invalid_argument, "unknown distance kind");
}

void check_applicable(const DistanceSpec& spec, std::size_t p) {
    if (spec.kind == DistanceKind::mlpc) {
        require(spec.k_max < p && p - spec.k_max >= 3, Errc::invalid_argument,
                fmt::format("MLPC with k_max={} is not applicable to features of length {}", spec.k_max, p));
    }
    if (spec.kind == DistanceKind::dtw_banded && spec.band) {
        require(*spec.band < p, Errc::invalid_argument,
                fmt::format("DTW band {} must be below the feature length {}", *spec.band, p));
    }
}

DistanceMatrix distance_matrix(const Matrix& x, const DistanceSpec& spec, Parallelism par) {
    const auto p = static_cast<std::size_t>(x.cols());
    check_applicable(spec, p);
    DistanceSpec resolved = spec;
    if (resolved.kind == DistanceKind::dtw_banded && !resolved.band) resolved.band = default_band(p);

    const Eigen::Index N = x.rows();
    DistanceMatrix out{resolved, Matrix::Zero(N, N)};
    detail::FirstError error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(detail::thread_count(par))
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = i + 1; j < N; ++j) {
            try {
                const double d = distance(row_span(x, i), row_span(x, j), resolved);
                out.values(i, j) = d;
                out.values(j, i) = d;
            } catch (const Error& e) {
                try {
                    throw Error(e.code(), fmt::format("pair ({}, {}): {}", i, j, e.what()));
                } catch (...) {
                    error.capture(static_cast<long long>(i) * N + j);
                }
            }
        }
    }
    error.rethrow();
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

void write_distance_csv(const DistanceMatrix& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), Errc::io, fmt::format("cannot write '{}'", path.string()));
    const Eigen::Index N = d.values.rows();
    for (Eigen::Index i = 0; i < N; ++i) {
        std::string line;
        for (Eigen::Index j = 0; j < N; ++j) {
            if (j) line += ',';
            line += fmt::format("{:.17g}", d.values(i, j));
        }
        line += '\n';
        out << line;
    }
}

Matrix read_distance_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::io, fmt::format("cannot open '{}'", path.string()));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail(Errc::parse, fmt::format("row {}: '{}' is not a number", rows.size() + 1, cell));
            }
        }
        rows.push_back(std::move(row));
    }
    const auto N = static_cast<Eigen::Index>(rows.size());
    Matrix m(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        require(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) == N, Errc::ragged_row,
                fmt::format("distance CSV row {} has {} entries, expected {}", i + 1,
                            rows[static_cast<std::size_t>(i)].size(), N));
        for (Eigen::Index j = 0; j < N; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

namespace {

constexpr std::array<char, 4> kMagic{'S', 'C', 'D', 'M'};

template <typename U>
void put_le(std::string& out, U value) {
    for (std::size_t b = 0; b < sizeof(U); ++b) out += static_cast<char>((value >> (8 * b)) & 0xFF);
}

template <typename U>
U get_le(const unsigned char* p) {
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(p[b]) << (8 * b);
    return v;
}

}  // namespace

std::uint32_t distance_kind_code(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::l2: return 1;
        case DistanceKind::mlpc: return 2;
        case DistanceKind::dtw: return 3;
        case DistanceKind::dtw_banded: return 4;
    }
    return 0;
}

void write_distance_binary(const DistanceMatrix& d, const std::filesystem::path& path) {
    const auto N = static_cast<std::uint64_t>(d.values.rows());
    std::string buf(kMagic.begin(), kMagic.end());
    put_le<std::uint64_t>(buf, N);
    put_le<std::uint32_t>(buf, distance_kind_code(d.spec.kind));
    for (std::uint64_t i = 1; i < N; ++i) {
        for (std::uint64_t j = 0; j < i; ++j) {
            put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(
                                           d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        }
    }
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), Errc::io, fmt::format("cannot write '{}'", path.string()));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

DistanceMatrix read_distance_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::io, fmt::format("cannot open '{}'", path.string()));
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    require(buf.size() >= 16 && std::equal(kMagic.begin(), kMagic.end(), buf.begin()), Errc::parse,
            "not a distance matrix file (bad magic)");
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    const auto N = get_le<std::uint64_t>(p + 4);
    const auto code = get_le<std::uint32_t>(p + 12);
    require(buf.size() == 16 + 8 * (N * (N - (N > 0 ? 1 : 0)) / 2), Errc::parse, "distance matrix file has the wrong size");

    DistanceMatrix d;
    bool known = false;
    for (auto kind : {DistanceKind::l2, DistanceKind::mlpc, DistanceKind::dtw, DistanceKind::dtw_banded}) {
        if (distance_kind_code(kind) == code) {
            d.spec.kind = kind;
            known = true;
        }
    }
    require(known, Errc::parse, fmt::format("unknown distance kind code {}", code));
    const auto n = static_cast<Eigen::Index>(N);
    d.values = Matrix::Zero(n, n);
    const unsigned char* q = p + 16;
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j, q += 8) {
            const double v = std::bit_cast<double>(get_le<std::uint64_t>(q));
            d.values(i, j) = v;
            d.values(j, i) = v;
        }
    }
    return d;
}

}  // namespace scenclust
