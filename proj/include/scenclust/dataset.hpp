#pragma once

#include "scenclust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenclust {

/// One scenario/location series.
struct TimeSeriesRecord {
    std::int64_t scenario_id = 0;
    std::int64_t location_id = 0;
    std::optional<double> lat;
    std::optional<double> lon;
    std::vector<double> values;
};

struct RecordInfo {
    std::int64_t scenario_id = 0;
    std::int64_t location_id = 0;
    std::optional<double> lat;
    std::optional<double> lon;

    bool operator==(const RecordInfo&) const = default;
};

enum class Preprocessing { raw, global_centered, zscored };

std::string_view to_string(Preprocessing tag);

/// N records of common length T, stored as an N x T row-major matrix.
///
/// Immutable after construction. The constructor enforces N >= 2, T > 1,
/// finite values and unique (scenario, location) pairs.
class Dataset {
public:
    Dataset(std::vector<RecordInfo> info, Matrix values,
            Preprocessing tag = Preprocessing::raw, double global_mean = 0.0);

    static Dataset from_records(std::vector<TimeSeriesRecord> records);

    std::size_t size() const { return info_.size(); }
    std::size_t length() const { return static_cast<std::size_t>(values_.cols()); }

    const Matrix& values() const { return values_; }
    Series series(std::size_t i) const { return row_span(values_, static_cast<Eigen::Index>(i)); }
    const RecordInfo& info(std::size_t i) const { return info_[i]; }
    const std::vector<RecordInfo>& infos() const { return info_; }

    Preprocessing preprocessing() const { return tag_; }
    /// Mean over all samples of all records at the time it was centered (0 unless centered).
    double global_mean() const { return global_mean_; }

    std::optional<std::size_t> find(std::int64_t scenario_id, std::int64_t location_id) const;

    TimeSeriesRecord record(std::size_t i) const;

    bool operator==(const Dataset& other) const;

private:
    std::vector<RecordInfo> info_;
    Matrix values_;
    Preprocessing tag_;
    double global_mean_;
};

enum class CsvLayout { wide, long_ };

Dataset load_csv(const std::filesystem::path& path, CsvLayout layout);
Dataset parse_csv(std::string_view text, CsvLayout layout);
void write_csv(const Dataset& ds, const std::filesystem::path& path, CsvLayout layout);
std::string format_csv(const Dataset& ds, CsvLayout layout);

/// Subtracts the mean over all samples of all records. Requires a raw dataset.
Dataset center_global(const Dataset& ds);

/// Per-record standardization with the population standard deviation.
Dataset zscore(const Dataset& ds);

/// Population (divide by n) mean and standard deviation.
struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};
Moments moments(Series x);

/// Parameters of the synthetic scenario generator.
///
/// Record (l, s) is m_l + a * g_s(t) + noise, where m_l ~ N(0, spread^2) is a
/// per-location offset and g_s is a zero-mean unit-RMS scenario shape shared
/// by every location of scenario s. Shapes are a random-phase sum of
/// low-frequency sinusoids plus a fixed day-night harmonic.
///
/// With `n_shape_groups > 0` scenario s takes the shape of group
/// s % n_shape_groups, shifted by a uniform lag in [-max_shape_lag, max_shape_lag].
struct SyntheticSpec {
    std::size_t n_locations = 10;
    std::size_t n_scenarios = 60;
    std::size_t length = 512;
    double location_mean_spread = 5.0;
    double scenario_shape_amplitude = 1.0;
    double noise_std = 0.3;
    std::uint64_t rng_seed = 7;

    std::size_t n_shape_groups = 0;
    std::size_t max_shape_lag = 0;
    /// Share of shape variance carried by the day-night harmonic.
    double diurnal_weight = 0.2;
    std::size_t diurnal_period = 24;

    void validate() const;
};

/// Ground truth alongside the generated data, for tests and reports.
struct SyntheticData {
    Dataset dataset;
    std::vector<double> location_means;  // m_l, indexed by location
    std::vector<int> shape_group;        // per scenario
    std::vector<int> shape_lag;          // per scenario
};

SyntheticData generate_synthetic_with_truth(const SyntheticSpec& spec);
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Reads `key = value` lines ('#' starts a comment).
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies recognized keys onto `spec`; unknown keys are a config error.
void apply_synthetic_config(SyntheticSpec& spec, const std::map<std::string, std::string>& kv);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

}  // namespace scenclust
