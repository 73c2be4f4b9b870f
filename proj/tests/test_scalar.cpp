#include <catch_amalgamated.hpp>

#include <relbill/scalar.hpp>

#include "test_support.hpp"

using namespace relbill;

TEST_CASE("parse_rational reads fractions and decimals exactly", "[scalar]") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("-1.25") == Rational(-5, 4));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("1.7e-27") == Rational(17) / Rational(boost::multiprecision::mpz_int("10000000000000000000000000000")));
    CHECK(parse_rational("  7 ") == Rational(7));
    CHECK(parse_rational("2E+2") == Rational(200));
    CHECK(parse_rational("0.010") == Rational(1, 100));
    CHECK(parse_rational("0.09") == Rational(9, 100));
    CHECK(parse_rational("010") == Rational(10));
    CHECK(parse_rational("1.2e-09") == Rational(12, 10000000000));
    CHECK(parse_rational("0") == Rational(0));
    CHECK(parse_rational("-0.000") == Rational(0));
}

TEST_CASE("parse_rational rejects malformed text", "[scalar]") {
    CHECK_THROWS_AS(parse_rational(""), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("1e100000"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational("1.2.3"), Error);
    CHECK_THROWS_AS(parse_scalar<double>("1x"), Error);
}

TEST_CASE("double formatting round-trips bit for bit", "[scalar][property]") {
    for (int i = 0; i < 10000; ++i) {
        const double v = testing::signed_magnitude(1e-300, 1.0) * std::pow(10.0, testing::uniform(-5, 300));
        REQUIRE(parse_scalar<double>(format_scalar(v)) == v);
    }
}

TEST_CASE("rational formatting round-trips", "[scalar]") {
    const Rational q = parse_rational("-123456789/987654321000");
    CHECK(parse_scalar<Rational>(format_scalar(q)) == q);
}

TEST_CASE("zero tests are relative in float mode and exact otherwise", "[scalar]") {
    CHECK(is_zero(1e-13, 1.0));
    CHECK_FALSE(is_zero(1e-11, 1.0));
    CHECK(is_zero(1.0, 1e13));
    CHECK_FALSE(is_zero(Rational(1, 1000000000), Rational(1)));
    CHECK(is_zero(Rational(0), Rational(1)));
}
