#include "scenclust/dataset.hpp"

#include "scenclust/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <utility>

namespace scenclust {

std::string_view to_string(Preprocessing tag) {
    switch (tag) {
        case Preprocessing::raw: return "raw";
        case Preprocessing::global_centered: return "global_centered";
        case Preprocessing::zscored: return "zscored";
    }
    return "raw";
}

Dataset::Dataset(std::vector<RecordInfo> info, Matrix values, Preprocessing tag, double global_mean)
    : info_(std::move(info)), values_(std::move(values)), tag_(tag), global_mean_(global_mean) {
    require(static_cast<Eigen::Index>(info_.size()) == values_.rows(), Errc::invalid_argument,
            "record metadata count does not match the number of value rows");
    require(info_.size() >= 2, Errc::dataset_too_small,
            fmt::format("dataset needs at least 2 records, got {}", info_.size()));
    require(values_.cols() > 1, Errc::dataset_too_small,
            fmt::format("series length must exceed 1, got {}", values_.cols()));
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index t = 0; t < values_.cols(); ++t) {
            if (!std::isfinite(values_(i, t))) {
                fail(Errc::non_finite, fmt::format("record {} (scenario {}, location {}) has a non-finite value at t={}",
                                                   i, info_[i].scenario_id, info_[i].location_id, t));
            }
        }
    }
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (std::size_t i = 0; i < info_.size(); ++i) {
        if (!seen.emplace(info_[i].scenario_id, info_[i].location_id).second) {
            fail(Errc::duplicate_record, fmt::format("duplicate record (scenario {}, location {}) at index {}",
                                                     info_[i].scenario_id, info_[i].location_id, i));
        }
    }
}

Dataset Dataset::from_records(std::vector<TimeSeriesRecord> records) {
    require(records.size() >= 2, Errc::dataset_too_small,
            fmt::format("dataset needs at least 2 records, got {}", records.size()));
    const std::size_t T = records.front().values.size();
    Matrix values(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(T));
    std::vector<RecordInfo> info;
    info.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        require(r.values.size() == T, Errc::ragged_row,
                fmt::format("record {} has length {}, expected {}", i, r.values.size(), T));
        std::copy(r.values.begin(), r.values.end(), values.row(static_cast<Eigen::Index>(i)).data());
        info.push_back({r.scenario_id, r.location_id, r.lat, r.lon});
    }
    return Dataset(std::move(info), std::move(values));
}

std::optional<std::size_t> Dataset::find(std::int64_t scenario_id, std::int64_t location_id) const {
    for (std::size_t i = 0; i < info_.size(); ++i) {
        if (info_[i].scenario_id == scenario_id && info_[i].location_id == location_id) return i;
    }
    return std::nullopt;
}

TimeSeriesRecord Dataset::record(std::size_t i) const {
    const auto s = series(i);
    return {info_[i].scenario_id, info_[i].location_id, info_[i].lat, info_[i].lon, {s.begin(), s.end()}};
}

bool Dataset::operator==(const Dataset& other) const {
    return info_ == other.info_ && tag_ == other.tag_ && global_mean_ == other.global_mean_ &&
           values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
           values_ == other.values_;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, std::size_t row, std::size_t col) {
    field = trim(field);
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        fail(Errc::parse, fmt::format("row {}, column {}: '{}' is not a number", row, col, field));
    }
    if (!std::isfinite(value)) {
        fail(Errc::non_finite, fmt::format("row {}, column {}: non-finite value '{}'", row, col, field));
    }
    return value;
}

std::int64_t parse_int(std::string_view field, std::size_t row, std::size_t col) {
    field = trim(field);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        fail(Errc::parse, fmt::format("row {}, column {}: '{}' is not an integer", row, col, field));
    }
    return value;
}

std::optional<double> parse_optional(std::string_view field, std::size_t row, std::size_t col) {
    if (trim(field).empty()) return std::nullopt;
    return parse_double(field, row, col);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        auto line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = pos + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

Dataset parse_wide(const std::vector<std::string_view>& lines) {
    require(!lines.empty(), Errc::parse, "empty CSV file");
    const auto header = split_fields(lines[0]);
    require(header.size() >= 5 && trim(header[0]) == "scenario" && trim(header[1]) == "location" &&
                trim(header[2]) == "lat" && trim(header[3]) == "lon",
            Errc::parse, "wide CSV header must start with 'scenario,location,lat,lon' followed by values");
    const std::size_t n_fields = header.size();
    const std::size_t T = n_fields - 4;

    std::vector<TimeSeriesRecord> records;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trim(lines[r]).empty()) continue;
        const auto fields = split_fields(lines[r]);
        const std::size_t row = r + 1;  // 1-based line number
        if (fields.size() != n_fields) {
            fail(Errc::ragged_row, fmt::format("row {} has {} values, expected {} (T={})", row,
                                               fields.size() < 4 ? 0 : fields.size() - 4, T, T));
        }
        TimeSeriesRecord rec;
        rec.scenario_id = parse_int(fields[0], row, 1);
        rec.location_id = parse_int(fields[1], row, 2);
        rec.lat = parse_optional(fields[2], row, 3);
        rec.lon = parse_optional(fields[3], row, 4);
        rec.values.reserve(T);
        for (std::size_t c = 4; c < n_fields; ++c) rec.values.push_back(parse_double(fields[c], row, c + 1));
        records.push_back(std::move(rec));
    }
    return Dataset::from_records(std::move(records));
}

Dataset parse_long(const std::vector<std::string_view>& lines) {
    require(!lines.empty(), Errc::parse, "empty CSV file");
    const auto header = split_fields(lines[0]);
    std::vector<std::string> names;
    for (auto h : header) names.emplace_back(trim(h));
    const bool with_coords = names == std::vector<std::string>{"scenario", "location", "lat", "lon", "t", "value"};
    require(with_coords || names == std::vector<std::string>{"scenario", "location", "t", "value"}, Errc::parse,
            "long CSV header must be 'scenario,location,t,value' or 'scenario,location,lat,lon,t,value'");

    struct Pending {
        TimeSeriesRecord rec;
        std::vector<std::pair<std::int64_t, double>> samples;
        std::size_t first_row = 0;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, Pending> by_key;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trim(lines[r]).empty()) continue;
        const auto fields = split_fields(lines[r]);
        const std::size_t row = r + 1;
        if (fields.size() != names.size()) {
            fail(Errc::ragged_row, fmt::format("row {} has {} fields, expected {}", row, fields.size(), names.size()));
        }
        const auto s = parse_int(fields[0], row, 1);
        const auto l = parse_int(fields[1], row, 2);
        auto [it, inserted] = by_key.try_emplace({s, l});
        auto& p = it->second;
        if (inserted) {
            p.rec.scenario_id = s;
            p.rec.location_id = l;
            p.first_row = row;
        }
        std::size_t col = 2;
        if (with_coords) {
            const auto lat = parse_optional(fields[2], row, 3);
            const auto lon = parse_optional(fields[3], row, 4);
            if (inserted) {
                p.rec.lat = lat;
                p.rec.lon = lon;
            }
            col = 4;
        }
        const auto t = parse_int(fields[col], row, col + 1);
        const auto v = parse_double(fields[col + 1], row, col + 2);
        p.samples.emplace_back(t, v);
    }

    std::vector<TimeSeriesRecord> records;
    std::optional<std::size_t> T;
    for (auto& [key, p] : by_key) {
        std::sort(p.samples.begin(), p.samples.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < p.samples.size(); ++i) {
            if (p.samples[i].first != static_cast<std::int64_t>(i)) {
                fail(Errc::ragged_row,
                     fmt::format("record (scenario {}, location {}) starting at row {} does not cover t=0..{} exactly once",
                                 key.first, key.second, p.first_row, p.samples.size() - 1));
            }
            p.rec.values.push_back(p.samples[i].second);
        }
        if (!T) T = p.rec.values.size();
        if (p.rec.values.size() != *T) {
            fail(Errc::ragged_row, fmt::format("record (scenario {}, location {}) starting at row {} has T={}, expected {}",
                                               key.first, key.second, p.first_row, p.rec.values.size(), *T));
        }
        records.push_back(std::move(p.rec));
    }
    return Dataset::from_records(std::move(records));
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

}  // namespace

Dataset parse_csv(std::string_view text, CsvLayout layout) {
    const auto lines = split_lines(text);
    return layout == CsvLayout::wide ? parse_wide(lines) : parse_long(lines);
}

Dataset load_csv(const std::filesystem::path& path, CsvLayout layout) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::io, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), layout);
}

std::string format_csv(const Dataset& ds, CsvLayout layout) {
    std::string out;
    const std::size_t T = ds.length();
    if (layout == CsvLayout::wide) {
        out += "scenario,location,lat,lon";
        for (std::size_t t = 0; t < T; ++t) out += fmt::format(",v{}", t);
        out += '\n';
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto& info = ds.info(i);
            out += fmt::format("{},{},{},{}", info.scenario_id, info.location_id, format_optional(info.lat),
                               format_optional(info.lon));
            for (double v : ds.series(i)) {
                out += ',';
                out += format_number(v);
            }
            out += '\n';
        }
        return out;
    }

    const bool with_coords = std::any_of(ds.infos().begin(), ds.infos().end(),
                                         [](const RecordInfo& r) { return r.lat || r.lon; });
    out += with_coords ? "scenario,location,lat,lon,t,value\n" : "scenario,location,t,value\n";
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(ds.info(a).scenario_id, ds.info(a).location_id) <
               std::pair(ds.info(b).scenario_id, ds.info(b).location_id);
    });
    for (std::size_t i : order) {
        const auto& info = ds.info(i);
        const auto s = ds.series(i);
        for (std::size_t t = 0; t < T; ++t) {
            if (with_coords) {
                out += fmt::format("{},{},{},{},{},{}\n", info.scenario_id, info.location_id, format_optional(info.lat),
                                   format_optional(info.lon), t, format_number(s[t]));
            } else {
                out += fmt::format("{},{},{},{}\n", info.scenario_id, info.location_id, t, format_number(s[t]));
            }
        }
    }
    return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, CsvLayout layout) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), Errc::io, fmt::format("cannot write '{}'", path.string()));
    out << format_csv(ds, layout);
}

// ---------------------------------------------------------------------------
// Preprocessing

Moments moments(Series x) {
    const double n = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / n)};
}

Dataset center_global(const Dataset& ds) {
    require(ds.preprocessing() == Preprocessing::raw, Errc::invalid_argument,
            fmt::format("center_global expects a raw dataset, got '{}'", to_string(ds.preprocessing())));
    const double mean = ds.values().mean();
    Matrix centered = ds.values().array() - mean;
    return Dataset(ds.infos(), std::move(centered), Preprocessing::global_centered, mean);
}

Dataset zscore(const Dataset& ds) {
    Matrix z(ds.values().rows(), ds.values().cols());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto m = moments(ds.series(i));
        if (!(m.stddev > 0.0)) {
            fail(Errc::zero_variance, fmt::format("record {} (scenario {}, location {}) has zero variance", i,
                                                  ds.info(i).scenario_id, ds.info(i).location_id));
        }
        const auto row = static_cast<Eigen::Index>(i);
        z.row(row) = (ds.values().row(row).array() - m.mean) / m.stddev;
    }
    return Dataset(ds.infos(), std::move(z), Preprocessing::zscored, ds.global_mean());
}

// ---------------------------------------------------------------------------
// Synthetic generator

void SyntheticSpec::validate() const {
    require(n_locations >= 1 && n_scenarios >= 1, Errc::invalid_argument,
            "n_locations and n_scenarios must be at least 1");
    require(n_locations * n_scenarios >= 2, Errc::invalid_argument, "synthetic dataset needs at least 2 records");
    require(length > 1, Errc::invalid_argument, "series length must exceed 1");
    for (double v : {location_mean_spread, scenario_shape_amplitude, noise_std}) {
        require(std::isfinite(v) && v >= 0.0, Errc::invalid_argument, "spreads must be finite and non-negative");
    }
    require(diurnal_weight >= 0.0 && diurnal_weight <= 1.0, Errc::invalid_argument, "diurnal_weight must lie in [0,1]");
    require(diurnal_period >= 2, Errc::invalid_argument, "diurnal_period must be at least 2");
    require(max_shape_lag < length, Errc::invalid_argument, "max_shape_lag must be below the series length");
}

namespace {

constexpr int kShapeComponents = 5;
constexpr double kMinCycles = 1.0;
constexpr double kMaxCycles = 12.0;

struct ShapeComponent {
    double cycles, phase, amplitude;
};

/// Removes the mean and scales to unit RMS; leaves all-zero input as is.
void normalize_unit_rms(std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double& v : x) {
        v -= mean;
        ss += v * v;
    }
    const double rms = std::sqrt(ss / static_cast<double>(x.size()));
    if (rms > 0.0) {
        for (double& v : x) v /= rms;
    }
}

}  // namespace

SyntheticData generate_synthetic_with_truth(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.rng_seed);
    std::normal_distribution<double> standard_normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t T = spec.length;
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<double> location_means(spec.n_locations);
    for (double& m : location_means) m = spec.location_mean_spread * standard_normal(rng);

    const std::size_t n_shapes = spec.n_shape_groups > 0 ? spec.n_shape_groups : spec.n_scenarios;
    std::vector<std::vector<ShapeComponent>> shapes(n_shapes);
    for (auto& comps : shapes) {
        comps.resize(kShapeComponents);
        for (auto& c : comps) {
            c.cycles = kMinCycles + (kMaxCycles - kMinCycles) * unit(rng);
            c.phase = two_pi * unit(rng);
            c.amplitude = 0.5 + unit(rng);
        }
    }

    std::vector<int> group(spec.n_scenarios), lag(spec.n_scenarios, 0);
    const auto lag_span = static_cast<std::int64_t>(spec.max_shape_lag);
    for (std::size_t s = 0; s < spec.n_scenarios; ++s) {
        group[s] = static_cast<int>(spec.n_shape_groups > 0 ? s % spec.n_shape_groups : s);
        if (lag_span > 0) {
            std::uniform_int_distribution<std::int64_t> lag_dist(-lag_span, lag_span);
            lag[s] = static_cast<int>(lag_dist(rng));
        }
    }

    std::vector<double> diurnal(T);
    for (std::size_t t = 0; t < T; ++t) {
        diurnal[t] = std::sin(two_pi * static_cast<double>(t) / static_cast<double>(spec.diurnal_period));
    }
    normalize_unit_rms(diurnal);

    std::vector<std::vector<double>> scenario_shape(spec.n_scenarios, std::vector<double>(T));
    for (std::size_t s = 0; s < spec.n_scenarios; ++s) {
        std::vector<double> synoptic(T, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const double tt = static_cast<double>(t) - lag[s];
            for (const auto& c : shapes[static_cast<std::size_t>(group[s])]) {
                synoptic[t] += c.amplitude * std::sin(two_pi * c.cycles * tt / static_cast<double>(T) + c.phase);
            }
        }
        normalize_unit_rms(synoptic);
        auto& g = scenario_shape[s];
        const double ws = std::sqrt(1.0 - spec.diurnal_weight), wd = std::sqrt(spec.diurnal_weight);
        for (std::size_t t = 0; t < T; ++t) g[t] = ws * synoptic[t] + wd * diurnal[t];
        normalize_unit_rms(g);
    }

    // Locations sit on a regular lat/lon grid; metadata only.
    const auto grid_cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.n_locations))));
    const std::size_t N = spec.n_locations * spec.n_scenarios;
    Matrix values(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(T));
    std::vector<RecordInfo> info;
    info.reserve(N);
    for (std::size_t s = 0; s < spec.n_scenarios; ++s) {
        for (std::size_t l = 0; l < spec.n_locations; ++l) {
            const auto row = static_cast<Eigen::Index>(info.size());
            const double lat = 42.0 + 0.25 * static_cast<double>(l / grid_cols);
            const double lon = -4.5 + 0.25 * static_cast<double>(l % grid_cols);
            info.push_back({static_cast<std::int64_t>(s), static_cast<std::int64_t>(l), lat, lon});
            for (std::size_t t = 0; t < T; ++t) {
                double v = location_means[l] + spec.scenario_shape_amplitude * scenario_shape[s][t];
                if (spec.noise_std > 0.0) v += spec.noise_std * standard_normal(rng);
                values(row, static_cast<Eigen::Index>(t)) = v;
            }
        }
    }

    return {Dataset(std::move(info), std::move(values)), std::move(location_means), std::move(group), std::move(lag)};
}

Dataset generate_synthetic(const SyntheticSpec& spec) { return generate_synthetic_with_truth(spec).dataset; }

// ---------------------------------------------------------------------------
// Key-value config

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        require(eq != std::string_view::npos, Errc::config, fmt::format("line {}: expected 'key = value'", line_no));
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        require(!key.empty(), Errc::config, fmt::format("line {}: empty key", line_no));
        kv[std::string(key)] = std::string(value);
    }
    return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), Errc::io, fmt::format("cannot open config '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

namespace {

template <typename T>
T parse_config_number(const std::string& key, const std::string& value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    require(ec == std::errc{} && ptr == value.data() + value.size(), Errc::config,
            fmt::format("config key '{}': invalid value '{}'", key, value));
    return out;
}

}  // namespace

void apply_synthetic_config(SyntheticSpec& spec, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "n_locations") spec.n_locations = parse_config_number<std::size_t>(key, value);
        else if (key == "n_scenarios") spec.n_scenarios = parse_config_number<std::size_t>(key, value);
        else if (key == "length" || key == "T") spec.length = parse_config_number<std::size_t>(key, value);
        else if (key == "location_mean_spread") spec.location_mean_spread = parse_config_number<double>(key, value);
        else if (key == "scenario_shape_amplitude") spec.scenario_shape_amplitude = parse_config_number<double>(key, value);
        else if (key == "noise_std") spec.noise_std = parse_config_number<double>(key, value);
        else if (key == "rng_seed" || key == "seed") spec.rng_seed = parse_config_number<std::uint64_t>(key, value);
        else if (key == "n_shape_groups") spec.n_shape_groups = parse_config_number<std::size_t>(key, value);
        else if (key == "max_shape_lag") spec.max_shape_lag = parse_config_number<std::size_t>(key, value);
        else if (key == "diurnal_weight") spec.diurnal_weight = parse_config_number<double>(key, value);
        else if (key == "diurnal_period") spec.diurnal_period = parse_config_number<std::size_t>(key, value);
        else fail(Errc::config, fmt::format("unknown synthetic config key '{}'", key));
    }
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    SyntheticSpec spec;
    apply_synthetic_config(spec, read_key_values(path));
    spec.validate();
    return spec;
}

}  // namespace scenclust
