#include <catch2/catch_amalgamated.hpp>

#include <cfdim/cf_core.hpp>
#include <cfdim/rng.hpp>

using namespace cfdim;

TEST_CASE("convergents follow the recursion with exact integers") {
    auto cs = convergents(CylinderWord{2, 3});
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].p == 1);
    CHECK(cs[0].q == 2);
    CHECK(cs[1].p == 3);
    CHECK(cs[1].q == 7);
    CHECK(fold(CylinderWord{2, 3}) == Rational(3, 7));

    // Fibonacci denominators for the all-ones word.
    auto fib = convergents(CylinderWord{1, 1, 1, 1});
    CHECK(fib[0].q == 1);
    CHECK(fib[1].q == 2);
    CHECK(fib[2].q == 3);
    CHECK(fib[3].q == 5);

    // Determinant identity at n = 2: p_1 q_2 - p_2 q_1 = (-1)^2.
    CHECK(cs[0].p * cs[1].q - cs[1].p * cs[0].q == 1);

    CHECK_THROWS_AS(convergents(CylinderWord{}), std::domain_error);
}

TEST_CASE("basic intervals carry exact endpoints and lengths") {
    auto i1 = basic_interval(CylinderWord{1});
    CHECK(i1.left == Rational(1, 2));
    CHECK(i1.right == Rational(1, 1));
    CHECK(i1.length() == Rational(1, 2));

    auto i2 = basic_interval(CylinderWord{2});
    CHECK(i2.left == Rational(1, 3));
    CHECK(i2.right == Rational(1, 2));
    CHECK(interval_length(CylinderWord{2}) == Rational(1, 6));

    CHECK(interval_length(CylinderWord{2, 3}) == Rational(1, 63));
    CHECK_THROWS_AS(basic_interval(CylinderWord{}), std::domain_error);
}

TEST_CASE("cf_expand iterates the Gauss map exactly") {
    CHECK(cf_expand(Rational(3, 7), 10).digits == CylinderWord({2, 3}).digits);
    CHECK(cf_expand(Rational(1, 2), 10).digits == CylinderWord({2}).digits);
    CHECK(cf_expand(Rational(5, 8), 10).digits == CylinderWord({1, 1, 1, 2}).digits);
    CHECK_THROWS_AS(cf_expand(Rational(0), 4), std::domain_error);
    CHECK_THROWS_AS(cf_expand(Rational(9, 8), 4), std::domain_error);

    SECTION("expand-then-fold is the identity on rationals in (0,1)") {
        Rng rng(7);
        for (int t = 0; t < 200; ++t) {
            const std::uint64_t den = rng.range(2, 1000000);
            const std::uint64_t num = rng.range(1, den - 1);
            const Rational x(num, den);
            CHECK(fold(cf_expand(x, 200)) == x);
        }
    }

    SECTION("max_digits truncates the expansion") {
        auto w = cf_expand(Rational(5, 8), 2);
        REQUIRE(w.length() == 2);
        CHECK(w.digits[0] == 1);
        CHECK(w.digits[1] == 1);
    }
}

TEST_CASE("insertion ratios respect the (b+1)/2 .. b+1 window") {
    CHECK(insertion_ratio(CylinderWord{1, 1}, 1, BigInt(1)) == Rational(3, 2));
    CHECK(insertion_ratio(CylinderWord{2, 3}, 1, BigInt(5)) == Rational(5));
    CHECK(insertion_ratio(CylinderWord{1, 2, 3}, 2, BigInt(9)) == Rational(87, 10));

    for (const auto& [ratio, b] :
         {std::pair{insertion_ratio(CylinderWord{2, 3}, 1, BigInt(5)), 5},
          std::pair{insertion_ratio(CylinderWord{1, 2, 3}, 2, BigInt(9)), 9}}) {
        CHECK(ratio * 2 >= Rational(b + 1));
        CHECK(ratio <= Rational(b + 1));
    }

    CHECK_THROWS_AS(insertion_ratio(CylinderWord{1, 2}, 2, BigInt(1)), std::domain_error);
    CHECK_THROWS_AS(insertion_ratio(CylinderWord{1, 2}, 0, BigInt(1)), std::domain_error);
    CHECK_THROWS_AS(insertion_ratio(CylinderWord{4}, 1, BigInt(1)), std::domain_error);
}

TEST_CASE("deletion length bound holds with constant 8/(j+1)^2") {
    auto [a, b] = deletion_length_bound(CylinderWord{5, 1}, 1);
    CHECK(a * 36 <= b * 8);

    auto [c, d] = deletion_length_bound(CylinderWord{1, 1}, 1);
    CHECK(c == Rational(1, 6));
    CHECK(d == Rational(1, 2));
    CHECK(c * 4 <= d * 8);

    auto [e, f] = deletion_length_bound(CylinderWord{3, 2, 4}, 2);
    CHECK(e == Rational(1, 1178));
    CHECK(f == Rational(1, 208));
    CHECK(e * 9 <= f * 8);

    CHECK_THROWS_AS(deletion_length_bound(CylinderWord{7}, 1), std::domain_error);
}

TEST_CASE("adjacent rank-n intervals stay within a factor of three") {
    auto [lo, mid, hi] = adjacent_interval_lengths(CylinderWord{2});
    CHECK(lo == Rational(1, 2));
    CHECK(mid == Rational(1, 6));
    CHECK(hi == Rational(1, 12));
    CHECK(lo <= mid * 3);

    auto t32 = adjacent_interval_lengths(CylinderWord{3, 2});
    CHECK(t32[0] == Rational(1, 28));
    CHECK(t32[1] == Rational(1, 70));
    CHECK(t32[2] == Rational(1, 130));

    auto t25 = adjacent_interval_lengths(CylinderWord{2, 5});
    CHECK(t25[0] == Rational(1, 99));
    CHECK(t25[1] == Rational(1, 143));
    CHECK(t25[2] == Rational(1, 195));

    for (const auto& triple : {t32, t25}) {
        for (const auto& nb : {triple[0], triple[2]}) {
            CHECK(nb * 3 >= triple[1]);
            CHECK(nb <= triple[1] * 3);
        }
    }

    CHECK_THROWS_AS(adjacent_interval_lengths(CylinderWord{3, 1}), std::domain_error);
}

TEST_CASE("rank-n intervals over a bounded alphabet tile without overlap") {
    // All rank-3 intervals over {1..4}: pairwise disjoint, total length < 1.
    std::vector<BasicInterval> ivs;
    for (std::uint64_t a = 1; a <= 4; ++a)
        for (std::uint64_t b = 1; b <= 4; ++b)
            for (std::uint64_t c = 1; c <= 4; ++c)
                ivs.push_back(basic_interval(CylinderWord{a, b, c}));
    std::sort(ivs.begin(), ivs.end(),
              [](const BasicInterval& x, const BasicInterval& y) { return x.left < y.left; });
    Rational total(0);
    for (std::size_t i = 0; i < ivs.size(); ++i) {
        total += ivs[i].length();
        if (i + 1 < ivs.size()) CHECK(ivs[i].right <= ivs[i + 1].left);
    }
    CHECK(total < 1);

    // Children of a fixed prefix fill the parent from inside as N grows.
    const CylinderWord parent{2, 1};
    const Rational parent_len = interval_length(parent);
    Rational prev(0);
    for (std::uint64_t N : {2, 4, 8, 16, 32}) {
        Rational sum(0);
        for (std::uint64_t a = 1; a <= N; ++a) {
            auto child = parent;
            child.digits.emplace_back(a);
            sum += interval_length(child);
        }
        CHECK(sum > prev);
        CHECK(sum < parent_len);
        prev = sum;
    }
    CHECK(parent_len - prev < parent_len / 16);
}

TEST_CASE("big logs keep full double precision at any magnitude") {
    BigInt big = BigInt(1) << 1000;
    CHECK(log_big(big) == Catch::Approx(1000.0 * M_LN2).epsilon(1e-14));
    CHECK(log_rational(Rational(1, big)) == Catch::Approx(-1000.0 * M_LN2).epsilon(1e-14));
    CHECK(log_rational(Rational(3, 7)) == Catch::Approx(std::log(3.0 / 7.0)).epsilon(1e-14));
    CHECK_THROWS_AS(log_big(BigInt(0)), std::domain_error);
}

TEST_CASE("words reject nonpositive digits") {
    CHECK_THROWS_AS(CylinderWord(std::vector<BigInt>{BigInt(0)}), std::domain_error);
    CHECK_THROWS_AS(CylinderWord(std::vector<BigInt>{BigInt(-3)}), std::domain_error);
}
