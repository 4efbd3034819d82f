#include "scenclust/error.hpp"

namespace scenclust {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::config: return "config";
        case Errc::io: return "io";
        case Errc::parse: return "parse";
        case Errc::ragged_row: return "ragged_row";
        case Errc::duplicate_record: return "duplicate_record";
        case Errc::non_finite: return "non_finite";
        case Errc::dataset_too_small: return "dataset_too_small";
        case Errc::zero_variance: return "zero_variance";
        case Errc::degenerate_data: return "degenerate_data";
        case Errc::length_mismatch: return "length_mismatch";
        case Errc::basis_absent: return "basis_absent";
        case Errc::bisection_failure: return "bisection_failure";
    }
    return "unknown";
}

}  // namespace scenclust
