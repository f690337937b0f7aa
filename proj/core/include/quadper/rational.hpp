// Exact rational arithmetic over arbitrary-precision integers, with the
// logarithmic height h(p/q) = log max(|p|, q) and canonical "p/q" text form.
#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace quadper {

using Int = mpz_class;

/// Reduced fraction with positive denominator; zero is 0/1.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(const Int& n) : v_(n) {}

    /// Throws std::invalid_argument on zero denominator.
    Rational(const Int& num, const Int& den);
    Rational(long num, long den) : Rational(Int(num), Int(den)) {}

    Int num() const { return v_.get_num(); }
    Int den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational abs() const { return sign() < 0 ? -*this : *this; }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ + b.v_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ - b.v_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ * b.v_)); }
    /// Throws on division by zero.
    friend Rational operator/(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.v_.get_mpq_t(), b.v_.get_mpq_t()) != 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) < 0; }

    double to_double() const { return v_.get_d(); }

private:
    explicit Rational(const mpq_class& canonical) : v_(canonical) {}
    mpq_class v_;  // kept canonical at all times
};

/// The unique reduced representative with positive denominator.
Rational normalize_rational(const Int& n, const Int& d);

/// log max(|num|, den).  height(0) = 0 since 0 = 0/1.
double height(const Rational& c);

std::string to_string(const Rational& c);

/// Inverse of to_string; accepts "p/q" or a bare integer "p".
Rational parse_rational(std::string_view s);

bool is_perfect_square(const Int& n);

/// Square root in Q if it exists (nonnegative root), else nullopt.
std::optional<Rational> sqrt_in_field(const Rational& u);

}  // namespace quadper
