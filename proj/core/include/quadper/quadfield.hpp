// Quadratic fields K = Q(sqrt(D)) for a fundamental discriminant D, with
// ring of integers Z[w], w = (a + sqrt(D))/2 satisfying w^2 = a*w - n.
// Elements are stored as x + y*w with per-coordinate reduced fractions.
#pragma once

#include "quadper/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace quadper {

struct QuadField {
    long long D = 0;  // fundamental discriminant
    int a = 0;        // 1 if D = 1 mod 4, else 0
    long long n = 0;  // (a*a - D)/4, so w satisfies T^2 - a*T + n = 0

    friend bool operator==(const QuadField&, const QuadField&) = default;
};

bool is_fundamental_discriminant(long long D);

/// Throws std::invalid_argument unless D is a fundamental discriminant.
QuadField make_field(long long D);

class QuadRational {
public:
    QuadRational() = default;
    QuadRational(QuadField field, Rational x, Rational y)
        : fld_(field), x_(std::move(x)), y_(std::move(y)) {}

    const QuadField& field() const { return fld_; }
    const Rational& x() const { return x_; }
    const Rational& y() const { return y_; }

    bool is_zero() const { return x_.is_zero() && y_.is_zero(); }
    bool is_rational() const { return y_.is_zero(); }

    QuadRational operator-() const { return {fld_, -x_, -y_}; }
    /// x + y*a - y*w (the image under the nontrivial field automorphism).
    QuadRational conjugate() const;
    /// N(x + y*w) = x^2 + a*x*y + n*y^2, a rational.
    Rational norm() const;

    friend QuadRational operator+(const QuadRational& u, const QuadRational& v);
    friend QuadRational operator-(const QuadRational& u, const QuadRational& v);
    friend QuadRational operator*(const QuadRational& u, const QuadRational& v);
    /// Throws on division by zero.
    friend QuadRational operator/(const QuadRational& u, const QuadRational& v);

    friend bool operator==(const QuadRational& u, const QuadRational& v);
    friend bool operator!=(const QuadRational& u, const QuadRational& v) { return !(u == v); }

private:
    QuadField fld_;
    Rational x_, y_;
};

/// max of the coordinate heights.
double height(const QuadRational& c);

/// Canonical form "x/b+y/d*w" (minus sign folded into the middle separator).
std::string to_string(const QuadRational& c);

/// Inverse of to_string; also accepts a bare rational "p/q" (meaning y = 0).
QuadRational parse_quad(std::string_view s, const QuadField& field);

/// Square root of u in K if one exists; prefers the root with y > 0 (x >= 0
/// when y = 0).  Solved exactly via the coordinate equations, no floating point.
std::optional<QuadRational> sqrt_in_field(const QuadRational& u);

}  // namespace quadper
