#include "quadper/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace quadper {

Rational::Rational(const Int& num, const Int& den) {
    if (sgn(den) == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::invalid_argument("Rational: division by zero");
    return Rational(mpq_class(a.v_ / b.v_));
}

Rational normalize_rational(const Int& n, const Int& d) { return Rational(n, d); }

double height(const Rational& c) {
    Int m = c.num();
    mpz_abs(m.get_mpz_t(), m.get_mpz_t());
    if (m < c.den()) m = c.den();
    // max(|num|, den) >= 1 always
    signed long exp2;
    double frac = mpz_get_d_2exp(&exp2, m.get_mpz_t());
    return std::log(frac) + static_cast<double>(exp2) * std::log(2.0);
}

std::string to_string(const Rational& c) {
    return c.num().get_str() + "/" + c.den().get_str();
}

Rational parse_rational(std::string_view s) {
    auto bad = [&]() -> std::invalid_argument {
        return std::invalid_argument("parse_rational: malformed input '" + std::string(s) + "'");
    };
    if (s.empty()) throw bad();
    std::string str(s);
    auto slash = str.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(str));
        Int n(str.substr(0, slash));
        Int d(str.substr(slash + 1));
        return Rational(n, d);
    } catch (const std::invalid_argument&) {
        throw bad();
    }
}

bool is_perfect_square(const Int& n) {
    if (sgn(n) < 0) return false;
    return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

std::optional<Rational> sqrt_in_field(const Rational& u) {
    if (u.sign() < 0) return std::nullopt;
    Int n = u.num(), d = u.den();
    if (!is_perfect_square(n) || !is_perfect_square(d)) return std::nullopt;
    Int rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    return Rational(rn, rd);
}

}  // namespace quadper
