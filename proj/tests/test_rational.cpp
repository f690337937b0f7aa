#include "doctest.h"

#include "quadper/rational.hpp"

#include <cmath>
#include <random>

using namespace quadper;

TEST_CASE("normalization") {
    CHECK(normalize_rational(2, 4) == Rational(1, 2));
    CHECK(normalize_rational(-29, 16) == Rational(-29, 16));
    CHECK(normalize_rational(0, 5) == Rational(0, 1));
    CHECK(normalize_rational(3, -6) == Rational(-1, 2));  // denominator made positive
    CHECK(normalize_rational(-29, 16).den() == 16);
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("normalization is idempotent on random inputs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        long n = static_cast<long>(rng() % 2001) - 1000;
        long d = static_cast<long>(rng() % 999) + 1;
        if (rng() & 1) d = -d;
        Rational once = normalize_rational(n, d);
        Rational twice = normalize_rational(once.num(), once.den());
        CHECK(once == twice);
        CHECK(once.den() > 0);
        CHECK(gcd(once.num(), once.den()) == 1);
    }
}

TEST_CASE("height") {
    CHECK(height(Rational(-29, 16)) == doctest::Approx(std::log(29.0)).epsilon(1e-12));
    CHECK(height(Rational(0)) == doctest::Approx(0.0));
    CHECK(height(Rational(1, 1000)) == doctest::Approx(std::log(1000.0)).epsilon(1e-12));
    // h(c) = h(-c)
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        Rational c(static_cast<long>(rng() % 5000) - 2500, static_cast<long>(rng() % 400) + 1);
        CHECK(height(c) == doctest::Approx(height(-c)));
    }
}

TEST_CASE("text round-trip") {
    CHECK(to_string(Rational(-29, 16)) == "-29/16");
    CHECK(to_string(Rational(0)) == "0/1");
    CHECK(parse_rational("-29/16") == Rational(-29, 16));
    CHECK(parse_rational("7") == Rational(7));
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        Rational c(static_cast<long>(rng() % 20001) - 10000, static_cast<long>(rng() % 999) + 1);
        CHECK(parse_rational(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_rational("x/3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("field axioms spot checks") {
    std::mt19937_64 rng(17);
    auto rnd = [&]() {
        return Rational(static_cast<long>(rng() % 201) - 100, static_cast<long>(rng() % 40) + 1);
    };
    for (int i = 0; i < 100; ++i) {
        Rational a = rnd(), b = rnd(), c = rnd();
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * (b + c) == a * b + a * c);
        if (!a.is_zero()) CHECK(a / a == Rational(1));
    }
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
}

TEST_CASE("rational square roots") {
    auto r = sqrt_in_field(Rational(9, 16));
    REQUIRE(r.has_value());
    CHECK(*r == Rational(3, 4));
    CHECK_FALSE(sqrt_in_field(Rational(33, 4)).has_value());
    CHECK_FALSE(sqrt_in_field(Rational(-4)).has_value());
    CHECK(*sqrt_in_field(Rational(0)) == Rational(0));

    std::mt19937_64 rng(19);
    for (int i = 0; i < 100; ++i) {
        Rational u(static_cast<long>(rng() % 401) - 200, static_cast<long>(rng() % 60) + 1);
        auto w = sqrt_in_field(u * u);
        REQUIRE(w.has_value());
        CHECK(*w * *w == u * u);
    }
}
