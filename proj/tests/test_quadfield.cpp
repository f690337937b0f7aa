#include "doctest.h"

#include "quadper/quadfield.hpp"

#include <cmath>
#include <random>

using namespace quadper;

TEST_CASE("field construction") {
    QuadField f3 = make_field(-3);
    CHECK(f3.a == 1);
    CHECK(f3.n == 1);  // T^2 - T + 1

    QuadField f4 = make_field(-4);
    CHECK(f4.a == 0);
    CHECK(f4.n == 1);  // T^2 + 1

    QuadField f33 = make_field(33);
    CHECK(f33.a == 1);
    CHECK(f33.n == -8);  // T^2 - T - 8

    // non-fundamental or degenerate discriminants are rejected
    for (long long bad : {0ll, 1ll, 4ll, 9ll, -12ll, 16ll, -16ll, 45ll, -27ll, 25ll})
        CHECK_THROWS_AS(make_field(bad), std::invalid_argument);
    for (long long good : {5ll, 8ll, 12ll, 13ll, -3ll, -4ll, -7ll, -8ll, -20ll, -40ll, 40ll})
        CHECK_NOTHROW(make_field(good));
}

TEST_CASE("arithmetic via the minimal polynomial") {
    QuadField f33 = make_field(33);
    QuadRational w(f33, Rational(0), Rational(1));
    CHECK(w * w == QuadRational(f33, Rational(8), Rational(1)));  // w^2 = 8 + w

    QuadField f4 = make_field(-4);
    QuadRational u(f4, Rational(1), Rational(1));
    QuadRational v(f4, Rational(1), Rational(-1));
    CHECK(u * v == QuadRational(f4, Rational(2), Rational(0)));  // (1+w)(1-w) = 2

    QuadRational zero(f33, Rational(0), Rational(0));
    QuadRational any(f33, Rational(3, 7), Rational(-2, 5));
    CHECK(any + zero == any);
    CHECK_THROWS_AS(any / zero, std::invalid_argument);

    QuadField f3 = make_field(-3);
    CHECK_THROWS_AS(any + QuadRational(f3, Rational(1), Rational(0)), std::invalid_argument);
}

TEST_CASE("conjugation and norms") {
    std::mt19937_64 rng(23);
    for (long long D : {-3ll, -4ll, 17ll, 33ll, -20ll}) {
        QuadField f = make_field(D);
        for (int i = 0; i < 50; ++i) {
            QuadRational u(f, Rational(static_cast<long>(rng() % 41) - 20,
                                       static_cast<long>(rng() % 12) + 1),
                           Rational(static_cast<long>(rng() % 41) - 20,
                                    static_cast<long>(rng() % 12) + 1));
            CHECK(u.conjugate().conjugate() == u);
            // u * conj(u) is rational and equals the norm
            QuadRational prod = u * u.conjugate();
            CHECK(prod.y().is_zero());
            CHECK(prod.x() == u.norm());
            if (!u.is_zero()) {
                QuadRational one(f, Rational(1), Rational(0));
                CHECK(u / u == one);
            }
        }
    }
}

TEST_CASE("coordinate heights") {
    QuadField f33 = make_field(33);
    CHECK(height(QuadRational(f33, Rational(-71, 48), Rational(0))) ==
          doctest::Approx(std::log(71.0)).epsilon(1e-12));
    QuadField f3 = make_field(-3);
    CHECK(height(QuadRational(f3, Rational(1, 4), Rational(1, 4))) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(height(QuadRational(f3, Rational(0), Rational(0))) == doctest::Approx(0.0));
}

TEST_CASE("text round-trip") {
    QuadField f3 = make_field(-3);
    QuadRational c(f3, Rational(1, 4), Rational(1, 4));
    CHECK(to_string(c) == "1/4+1/4*w");
    CHECK(parse_quad("1/4+1/4*w", f3) == c);

    QuadRational d(f3, Rational(-5, 12), Rational(-1, 3));
    CHECK(to_string(d) == "-5/12-1/3*w");
    CHECK(parse_quad(to_string(d), f3) == d);

    CHECK(parse_quad("-71/48", make_field(33)) ==
          QuadRational(make_field(33), Rational(-71, 48), Rational(0)));

    std::mt19937_64 rng(29);
    for (int i = 0; i < 100; ++i) {
        QuadRational u(f3, Rational(static_cast<long>(rng() % 2001) - 1000,
                                    static_cast<long>(rng() % 99) + 1),
                       Rational(static_cast<long>(rng() % 2001) - 1000,
                                static_cast<long>(rng() % 99) + 1));
        CHECK(parse_quad(to_string(u), f3) == u);
    }
}

TEST_CASE("square roots in K") {
    // sqrt(33/4) in Q(sqrt 33) is -1/2 + w
    QuadField f33 = make_field(33);
    auto r = sqrt_in_field(QuadRational(f33, Rational(33, 4), Rational(0)));
    REQUIRE(r.has_value());
    CHECK(*r == QuadRational(f33, Rational(-1, 2), Rational(1)));

    // 1 - 4c for c = -29/16 is 33/4: no rational fixed point
    CHECK_FALSE(sqrt_in_field(Rational(33, 4)).has_value());

    std::mt19937_64 rng(31);
    for (long long D : {-3ll, -4ll, 17ll, 33ll}) {
        QuadField f = make_field(D);
        for (int i = 0; i < 60; ++i) {
            QuadRational u(f, Rational(static_cast<long>(rng() % 31) - 15,
                                       static_cast<long>(rng() % 9) + 1),
                           Rational(static_cast<long>(rng() % 31) - 15,
                                    static_cast<long>(rng() % 9) + 1));
            auto w = sqrt_in_field(u * u);
            REQUIRE(w.has_value());
            CHECK(*w * *w == u * u);
        }
    }
}
