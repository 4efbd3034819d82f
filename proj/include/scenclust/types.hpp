#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace scenclust {

/// Row-major so that each record (row) is a contiguous series.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using Series = std::span<const double>;

inline Series row_span(const Matrix& m, Eigen::Index row) {
    return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Number of worker threads; 0 means "use the runtime default".
struct Parallelism {
    int threads = 0;
};

}  // namespace scenclust
