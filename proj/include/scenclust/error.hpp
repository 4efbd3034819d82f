#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scenclust {

/// Failure categories. The CLI maps `config`, `invalid_argument` and `io`
/// to exit code 2 and everything else to exit code 3.
enum class Errc {
    invalid_argument,
    config,
    io,
    parse,
    ragged_row,
    duplicate_record,
    non_finite,
    dataset_too_small,
    zero_variance,
    degenerate_data,
    length_mismatch,
    basis_absent,
    bisection_failure,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

    /// True for errors caused by the caller's configuration rather than the data.
    bool is_config_error() const noexcept {
        return code_ == Errc::invalid_argument || code_ == Errc::config || code_ == Errc::io;
    }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, Errc code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace scenclust
