#pragma once

#include "scenclust/dataset.hpp"
#include "scenclust/error.hpp"

#include <functional>
#include <random>
#include <vector>

namespace testing {

/// Dataset with one location and scenarios 0..N-1, one per row.
inline scenclust::Dataset make_dataset(const scenclust::Matrix& values,
                                       scenclust::Preprocessing tag = scenclust::Preprocessing::raw) {
    std::vector<scenclust::RecordInfo> infos(static_cast<std::size_t>(values.rows()));
    for (std::size_t i = 0; i < infos.size(); ++i) infos[i].scenario_id = static_cast<std::int64_t>(i);
    return scenclust::Dataset(std::move(infos), values, tag);
}

inline scenclust::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    scenclust::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
}

inline std::vector<double> to_vector(scenclust::Series s) { return {s.begin(), s.end()}; }

inline scenclust::Errc error_code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const scenclust::Error& e) {
        return e.code();
    }
    throw std::logic_error("expected a scenclust::Error");
}

}  // namespace testing
