#include <doctest.h>

#include "scenclust/dataset.hpp"
#include "scenclust/error.hpp"

#include <cmath>
#include <filesystem>
#include <random>

#include "helpers.hpp"

using namespace scenclust;
using testing::error_code_of;

namespace {

Dataset two_by(std::vector<double> a, std::vector<double> b) {
    return Dataset::from_records({{0, 0, std::nullopt, std::nullopt, std::move(a)},
                                  {1, 0, std::nullopt, std::nullopt, std::move(b)}});
}

}  // namespace

TEST_CASE("wide CSV echoes its rows") {
    const auto ds = parse_csv("scenario,location,lat,lon,v0,v1,v2\n0,3,45.5,2.25,1,2,3\n1,3,,,4,5,6\n", CsvLayout::wide);
    CHECK(ds.size() == 2);
    CHECK(ds.length() == 3);
    CHECK(ds.info(0).location_id == 3);
    CHECK(ds.info(0).lat == 45.5);
    CHECK_FALSE(ds.info(1).lat.has_value());
    CHECK(ds.series(1)[2] == 6.0);
    CHECK(ds.preprocessing() == Preprocessing::raw);
}

TEST_CASE("long CSV matches the wide equivalent") {
    const auto wide = parse_csv("scenario,location,lat,lon,v0,v1,v2\n0,0,,,1,2,3\n1,0,,,4,5,6\n", CsvLayout::wide);
    // Rows deliberately out of order; records are sorted by (scenario, location).
    const auto long_ = parse_csv("scenario,location,t,value\n1,0,2,6\n0,0,0,1\n0,0,1,2\n1,0,0,4\n0,0,2,3\n1,0,1,5\n",
                                 CsvLayout::long_);
    CHECK(long_ == wide);
}

TEST_CASE("ingestion errors") {
    CHECK(error_code_of([] { parse_csv("scenario,location,lat,lon,v0,v1,v2\n0,0,,,1,2,3\n1,0,,,1,2,3,4\n", CsvLayout::wide); }) ==
          Errc::ragged_row);
    CHECK(error_code_of([] { parse_csv("scenario,location,lat,lon,v0,v1\n0,0,,,1,x\n1,0,,,1,2\n", CsvLayout::wide); }) ==
          Errc::parse);
    CHECK(error_code_of([] { parse_csv("scenario,location,lat,lon,v0,v1\n0,0,,,1,2\n", CsvLayout::wide); }) ==
          Errc::dataset_too_small);
    CHECK(error_code_of([] { parse_csv("scenario,location,lat,lon,v0,v1\n0,0,,,1,2\n0,0,,,3,4\n", CsvLayout::wide); }) ==
          Errc::duplicate_record);
    CHECK(error_code_of([] { parse_csv("scenario,location,lat,lon,v0,v1\n0,0,,,1,nan\n1,0,,,3,4\n", CsvLayout::wide); }) ==
          Errc::non_finite);
    CHECK(error_code_of([] {
              parse_csv("scenario,location,t,value\n0,0,0,1\n0,0,1,2\n1,0,0,4\n", CsvLayout::long_);
          }) == Errc::ragged_row);

    try {
        parse_csv("scenario,location,lat,lon,v0,v1\n0,0,,,1,2\n1,0,,,1,oops\n", CsvLayout::wide);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("row 3, column 6") != std::string::npos);
    }
}

TEST_CASE("CSV round trip is exact in both layouts") {
    SyntheticSpec spec;
    spec.n_locations = 3;
    spec.n_scenarios = 4;
    spec.length = 17;
    const auto ds = generate_synthetic(spec);
    for (auto layout : {CsvLayout::wide, CsvLayout::long_}) {
        CHECK(parse_csv(format_csv(ds, layout), layout) == ds);
    }
    const auto path = std::filesystem::temp_directory_path() / "scenclust_roundtrip.csv";
    write_csv(ds, path, CsvLayout::wide);
    CHECK(load_csv(path, CsvLayout::wide) == ds);
    std::filesystem::remove(path);
}

TEST_CASE("center_global") {
    SUBCASE("all zeros stays put") {
        const auto c = center_global(two_by({0, 0}, {0, 0}));
        CHECK(c.global_mean() == 0.0);
        CHECK(c.values().isZero());
    }
    SUBCASE("hand-evaluated mean") {
        const auto c = center_global(two_by({1, 1}, {3, 3}));
        CHECK(c.global_mean() == 2.0);
        CHECK(c.series(0)[0] == -1.0);
        CHECK(c.series(1)[1] == 1.0);
        CHECK(c.preprocessing() == Preprocessing::global_centered);
    }
    SUBCASE("centering twice is rejected") {
        const auto c = center_global(two_by({1, 2}, {3, 4}));
        CHECK_THROWS_AS(center_global(c), Error);
    }
    SUBCASE("pairwise differences are preserved") {
        const auto ds = generate_synthetic({});
        const auto c = center_global(ds);
        CHECK(std::abs(c.values().mean()) < 1e-9 * std::max(1.0, moments({c.values().data(), static_cast<std::size_t>(c.values().size())}).stddev));
        const Eigen::VectorXd before = ds.values().row(0) - ds.values().row(5);
        const Eigen::VectorXd after = c.values().row(0) - c.values().row(5);
        CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zscore") {
    SUBCASE("[0,2] -> [-1,1] with the population convention") {
        const auto z = zscore(two_by({0, 2}, {1, 5}));
        CHECK(z.series(0)[0] == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(z.series(0)[1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(z.preprocessing() == Preprocessing::zscored);
    }
    SUBCASE("normalized input is unchanged") {
        const auto z = zscore(two_by({-1, 1, -1, 1}, {1, -1, 1, -1}));
        const auto zz = zscore(z);
        CHECK((z.values() - zz.values()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("constant record") {
        CHECK(error_code_of([] { zscore(two_by({5, 5, 5}, {1, 2, 3})); }) == Errc::zero_variance);
    }
    SUBCASE("every record ends with mean 0 and std 1") {
        const auto z = zscore(generate_synthetic({}));
        for (std::size_t i = 0; i < z.size(); ++i) {
            const auto m = moments(z.series(i));
            CHECK(std::abs(m.mean) < 1e-9);
            CHECK(std::abs(m.stddev - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("synthetic generator") {
    SUBCASE("all parameters zero gives zeros") {
        SyntheticSpec spec;
        spec.location_mean_spread = 0;
        spec.scenario_shape_amplitude = 0;
        spec.noise_std = 0;
        spec.n_locations = 3;
        spec.n_scenarios = 3;
        spec.length = 32;
        CHECK(generate_synthetic(spec).values().isZero(0.0));
    }
    SUBCASE("same seed, identical data") {
        SyntheticSpec spec;
        spec.length = 64;
        CHECK(generate_synthetic(spec) == generate_synthetic(spec));
        auto other = spec;
        other.rng_seed = 8;
        CHECK_FALSE(generate_synthetic(spec) == generate_synthetic(other));
    }
    SUBCASE("location means carry the spread, scenarios do not") {
        SyntheticSpec spec;
        spec.n_locations = 10;
        spec.n_scenarios = 10;
        spec.length = 256;
        spec.location_mean_spread = 5;
        spec.scenario_shape_amplitude = 1;
        spec.noise_std = 0.1;
        const auto truth = generate_synthetic_with_truth(spec);
        const auto& ds = truth.dataset;
        // Per location: spread of record means across scenarios.
        double worst_within = 0;
        std::vector<double> loc_means(10, 0.0);
        for (std::size_t l = 0; l < 10; ++l) {
            std::vector<double> means;
            for (std::size_t s = 0; s < 10; ++s) means.push_back(moments(ds.series(*ds.find(s, l))).mean);
            worst_within = std::max(worst_within, moments(means).stddev);
            loc_means[l] = moments(means).mean;
            CHECK(loc_means[l] == doctest::Approx(truth.location_means[l]).epsilon(0).scale(0).epsilon(0.05));
        }
        const double across = moments(loc_means).stddev;
        // Noise of std 0.1 over 256 samples moves a mean by about 0.006.
        CHECK(worst_within < 0.05);
        CHECK(across > 2.5);
        CHECK(across < 7.5);
    }
    SUBCASE("noise-free records of one scenario differ by a constant") {
        SyntheticSpec spec;
        spec.noise_std = 0;
        spec.length = 128;
        const auto ds = generate_synthetic(spec);
        const Eigen::VectorXd diff = ds.values().row(0) - ds.values().row(1);  // scenario 0, locations 0 and 1
        CHECK(diff.maxCoeff() - diff.minCoeff() < 1e-12);
    }
    SUBCASE("planted groups share shapes up to the planted lag") {
        SyntheticSpec spec;
        spec.n_locations = 1;
        spec.n_scenarios = 6;
        spec.n_shape_groups = 3;
        spec.max_shape_lag = 0;
        spec.noise_std = 0;
        spec.location_mean_spread = 0;
        spec.length = 128;
        const auto truth = generate_synthetic_with_truth(spec);
        CHECK(truth.shape_group == std::vector<int>{0, 1, 2, 0, 1, 2});
        const auto& v = truth.dataset.values();
        CHECK((v.row(0) - v.row(3)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((v.row(0) - v.row(1)).cwiseAbs().maxCoeff() > 0.1);
    }
    SUBCASE("invalid spec") {
        SyntheticSpec spec;
        spec.noise_std = -1;
        CHECK_THROWS_AS(generate_synthetic(spec), Error);
        spec = {};
        spec.n_locations = 1;
        spec.n_scenarios = 1;
        CHECK_THROWS_AS(generate_synthetic(spec), Error);
    }
}

TEST_CASE("key-value synthetic config") {
    const auto kv = parse_key_values("# demo\nn_locations = 4\nn_scenarios=5\nlength = 48 # trailing\nseed = 11\n");
    SyntheticSpec spec;
    apply_synthetic_config(spec, kv);
    CHECK(spec.n_locations == 4);
    CHECK(spec.n_scenarios == 5);
    CHECK(spec.length == 48);
    CHECK(spec.rng_seed == 11);
    CHECK(error_code_of([&] { apply_synthetic_config(spec, {{"bogus", "1"}}); }) == Errc::config);
    CHECK(error_code_of([&] { apply_synthetic_config(spec, {{"length", "abc"}}); }) == Errc::config);
}
