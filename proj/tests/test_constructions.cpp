#include <catch2/catch_amalgamated.hpp>

#include <cfdim/constructions.hpp>
#include <cfdim/word_stats.hpp>

using namespace cfdim;

TEST_CASE("growth sequences validate positivity") {
    auto id = GrowthSequence::identity();
    CHECK(id(1) == 1);
    CHECK(id(1000) == 1000);
    CHECK_THROWS_AS(id(0), std::domain_error);
    auto bad = GrowthSequence::from_function("zero", [](std::uint64_t) { return 0ull; });
    CHECK_THROWS_AS(bad(3), std::domain_error);
}

TEST_CASE("seed points track the prescribed law under the growth cap") {
    auto id = GrowthSequence::identity();

    SECTION("degenerate law yields the all-ones word") {
        auto w = seed_point(FrequencyVector::from_entries({{1, 1.0}}), id, 500, 42);
        for (const auto& d : w.digits) CHECK(d == 1);
    }

    SECTION("digits never exceed the cap c_m") {
        auto gauss = FrequencyVector::gauss();
        auto w = seed_point(gauss, id, 2000, 7);
        for (std::size_t m = 1; m <= w.length(); ++m) CHECK(w.digits[m - 1] <= BigInt(m));
    }

    SECTION("same seed reproduces the word, different seeds differ") {
        auto gauss = FrequencyVector::gauss();
        auto a = seed_point(gauss, id, 300, 1234);
        auto b = seed_point(gauss, id, 300, 1234);
        auto c = seed_point(gauss, id, 300, 1235);
        CHECK(a.digits == b.digits);
        CHECK(a.digits != c.digits);
    }

    SECTION("empirical frequencies approach the law") {
        auto half = FrequencyVector::from_entries({{1, 0.5}, {2, 0.5}});
        auto w = seed_point(half, id, 20000, 99);
        auto [count, ratio] = digit_frequency(w, BigInt(1));
        CHECK(std::abs(double(count) / 20000.0 - 0.5) < 0.02);

        // Strong-law trend: the error median shrinks along n = 10^2..10^4.
        double prev = 1.0;
        for (std::size_t n : {100u, 1000u, 10000u}) {
            std::vector<double> errs;
            for (std::uint64_t s = 0; s < 9; ++s) {
                auto ws = seed_point(half, id, n, 1000 + s);
                errs.push_back(std::abs(
                    double(digit_frequency(ws, BigInt(1)).first) / double(n) - 0.5));
            }
            std::sort(errs.begin(), errs.end());
            CHECK(errs[4] <= prev + 1e-12);
            prev = errs[4];
        }
    }

    SECTION("laws with no mass below the cap fall back to uniform") {
        auto late = FrequencyVector::from_entries({{5, 1.0}});
        auto w = seed_point(late, id, 64, 3);
        for (std::size_t m = 1; m <= 4; ++m) CHECK(w.digits[m - 1] <= BigInt(m));
        auto [c5, r5] = digit_frequency(w, BigInt(5));
        CHECK(c5 > 40);  // once digit 5 is available the law concentrates there
    }
}

TEST_CASE("fz digit ranges are exact integer intervals") {
    auto [lo1, hi1] = fz_digit_range(2.0, 3);  // (8, 16]
    CHECK(lo1 == 9);
    CHECK(hi1 == 16);
    auto [lo2, hi2] = fz_digit_range(std::exp(1.0), 1);  // (e, 2e]
    CHECK(lo2 == 3);
    CHECK(hi2 == 5);
    // Huge powers stay exact: floor(2 * 2^100) has bit length 102.
    auto [lo3, hi3] = fz_digit_range(2.0, 100);
    CHECK(hi3 == (BigInt(1) << 101));
    CHECK(lo3 == (BigInt(1) << 100) + 1);
}

TEST_CASE("fz points force huge digits exactly at squares") {
    auto params = FzParameters::all_ones(std::exp(1.0), 16);
    auto w = fz_point(params, 16, 11);
    REQUIRE(w.length() == 16);
    for (std::size_t pos = 1; pos <= 16; ++pos) {
        const auto root = isqrt_u64(pos);
        if (root * root == pos) {
            auto [lo, hi] = fz_digit_range(std::exp(1.0), static_cast<unsigned>(pos));
            CHECK(w.digits[pos - 1] >= lo);
            CHECK(w.digits[pos - 1] <= hi);
        } else {
            CHECK(w.digits[pos - 1] == 1);
        }
    }

    SECTION("same seed gives the same word") {
        CHECK(fz_point(params, 16, 11).digits == w.digits);
        CHECK(fz_point(params, 16, 12).digits != w.digits);
    }

    SECTION("square positions have vanishing density") {
        auto long_params = FzParameters::all_ones(std::exp(1.0), 900);
        auto lw = fz_point(long_params, 900, 5);
        auto [ones, ratio] = digit_frequency(lw, BigInt(1));
        CHECK(ones == 900 - 30);  // 30 squares below 900
    }

    // b itself must exceed 1; just above 1 the k = 1 range is already
    // nonempty ({2}), so the empty-range guard never fires for valid b.
    CHECK_THROWS_AS(FzParameters::all_ones(1.0, 4), std::domain_error);
    {
        auto [lo, hi] = fz_digit_range(1.0 + 1e-12, 1);
        CHECK(lo == 2);
        CHECK(hi == 2);
    }
}

TEST_CASE("fz cylinder masses follow the squared-index law") {
    for (std::uint64_t m : {1u, 2u, 3u})
        CHECK(fz_measure_log_mass(m, std::exp(1.0)) == Catch::Approx(-1.0).epsilon(1e-12));
    CHECK(fz_measure_log_mass(4, std::exp(1.0)) == Catch::Approx(-5.0).epsilon(1e-12));
    CHECK(fz_measure_log_mass(9, 2.0) == Catch::Approx(-14.0 * std::log(2.0)).epsilon(1e-12));

    // Constant on [n^2, (n+1)^2), then a factor b^{-(n+1)^2}.
    const double b = 3.0;
    CHECK(fz_measure_log_mass(8, b) == fz_measure_log_mass(4, b));
    CHECK(fz_measure_log_mass(9, b) - fz_measure_log_mass(8, b) ==
          Catch::Approx(-9.0 * std::log(b)).epsilon(1e-12));
}

TEST_CASE("local dimension profiles stay above the theta = 0.1 floor") {
    const double b = std::exp(10.0);
    auto params = FzParameters::all_ones(b, 102);
    std::vector<std::uint64_t> depths;
    for (std::uint64_t m = 4; m <= 100; ++m) depths.push_back(m);

    for (std::uint64_t seed : {21u, 22u}) {
        auto w = fz_point(params, 102, seed);
        auto prof = local_dimension_profile(w, b, depths);
        CHECK(prof.verified);
        REQUIRE(prof.points.size() == depths.size());
        for (const auto& pt : prof.points) {
            CHECK(pt.ratio >= 0.4);
            CHECK(pt.log_mass < 0.0);
            CHECK(pt.log_length < 0.0);
        }
        CHECK(prof.points.back().ratio > 0.45);

        // The covering-constant correction stays a small perturbation.
        for (const auto& pt : prof.points)
            CHECK(std::abs(pt.ratio_factor3 - pt.ratio) < 0.05);
    }

    SECTION("the interval-length upper bound holds exactly per word") {
        auto w = fz_point(params, 102, 33);
        auto prof = local_dimension_profile(w, b, depths);
        for (const auto& pt : prof.points) {
            const std::uint64_t m = pt.m;
            const std::uint64_t n = isqrt_u64(m);
            double sum_sq = 0.0;
            for (std::uint64_t k = 1; k <= n + 1; ++k) sum_sq += double(k) * double(k);
            double sum_logs = 0.0;
            for (std::uint64_t k = 1; k <= (n + 1) * (n + 1); ++k)
                sum_logs += std::log(double(k) + 1.0);
            const double rhs = std::log(2.0) + 2.0 * double(n + 1) * std::log(3.0) +
                               2.0 * sum_sq * std::log(b) + 2.0 * sum_logs;
            CHECK(-pt.log_length <= rhs);
        }
    }

    SECTION("ratios drift toward 1/2 as b grows at fixed depth") {
        for (double bb : {std::exp(20.0), std::exp(40.0)}) {
            auto p2 = FzParameters::all_ones(bb, 32);
            auto w2 = fz_point(p2, 32, 9);
            auto prof = local_dimension_profile(w2, bb, {10, 20, 30});
            for (const auto& pt : prof.points) CHECK(std::abs(pt.ratio - 0.5) < 0.05);
        }
    }

    SECTION("a mismatched word still profiles but is flagged") {
        CylinderWord ones(std::vector<BigInt>(40, BigInt(1)));
        auto prof = local_dimension_profile(ones, b, {4, 10, 20});
        CHECK_FALSE(prof.verified);
        for (const auto& pt : prof.points) CHECK(std::isfinite(pt.ratio));
    }
}
