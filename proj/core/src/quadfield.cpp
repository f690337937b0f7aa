#include "quadper/quadfield.hpp"

#include <algorithm>
#include <stdexcept>

namespace quadper {

namespace {

long long mod4(long long v) { return ((v % 4) + 4) % 4; }

bool is_squarefree(long long v) {
    if (v < 0) v = -v;
    if (v == 0) return false;
    for (long long d = 2; d * d <= v; ++d) {
        if (v % (d * d) == 0) return false;
    }
    return true;
}

}  // namespace

bool is_fundamental_discriminant(long long D) {
    if (D == 0 || D == 1) return false;
    if (mod4(D) == 1) return is_squarefree(D);
    if (mod4(D) == 0) {
        long long m = D / 4;
        return is_squarefree(m) && (mod4(m) == 2 || mod4(m) == 3);
    }
    return false;
}

QuadField make_field(long long D) {
    if (!is_fundamental_discriminant(D))
        throw std::invalid_argument("make_field: " + std::to_string(D) +
                                    " is not a fundamental discriminant");
    QuadField f;
    f.D = D;
    f.a = (mod4(D) == 1) ? 1 : 0;
    f.n = (static_cast<long long>(f.a) * f.a - D) / 4;
    return f;
}

namespace {

void require_same_field(const QuadRational& u, const QuadRational& v) {
    if (!(u.field() == v.field()))
        throw std::invalid_argument("QuadRational: mixed-field arithmetic");
}

}  // namespace

QuadRational QuadRational::conjugate() const {
    return {fld_, x_ + y_ * Rational(fld_.a), -y_};
}

Rational QuadRational::norm() const {
    return x_ * x_ + Rational(fld_.a) * x_ * y_ + Rational(fld_.n) * y_ * y_;
}

QuadRational operator+(const QuadRational& u, const QuadRational& v) {
    require_same_field(u, v);
    return {u.fld_, u.x_ + v.x_, u.y_ + v.y_};
}

QuadRational operator-(const QuadRational& u, const QuadRational& v) {
    require_same_field(u, v);
    return {u.fld_, u.x_ - v.x_, u.y_ - v.y_};
}

QuadRational operator*(const QuadRational& u, const QuadRational& v) {
    require_same_field(u, v);
    // (x1 + y1 w)(x2 + y2 w) with w^2 = a w - n
    Rational yy = u.y_ * v.y_;
    Rational x = u.x_ * v.x_ - Rational(u.fld_.n) * yy;
    Rational y = u.x_ * v.y_ + u.y_ * v.x_ + Rational(u.fld_.a) * yy;
    return {u.fld_, x, y};
}

QuadRational operator/(const QuadRational& u, const QuadRational& v) {
    require_same_field(u, v);
    if (v.is_zero()) throw std::invalid_argument("QuadRational: division by zero");
    QuadRational num = u * v.conjugate();
    Rational nv = v.norm();
    return {u.fld_, num.x_ / nv, num.y_ / nv};
}

bool operator==(const QuadRational& u, const QuadRational& v) {
    return u.fld_ == v.fld_ && u.x_ == v.x_ && u.y_ == v.y_;
}

double height(const QuadRational& c) {
    return std::max(height(c.x()), height(c.y()));
}

std::string to_string(const QuadRational& c) {
    std::string s = to_string(c.x());
    s += (c.y().sign() < 0) ? '-' : '+';
    s += to_string(c.y().abs());
    s += "*w";
    return s;
}

QuadRational parse_quad(std::string_view s, const QuadField& field) {
    std::string str(s);
    bool has_w = false;
    if (str.size() >= 2 && str.substr(str.size() - 2) == "*w") {
        has_w = true;
        str.resize(str.size() - 2);
    }
    if (!has_w) return {field, parse_rational(str), Rational(0)};
    auto sep = str.find_last_of("+-");
    if (sep == std::string::npos || sep == 0)
        throw std::invalid_argument("parse_quad: malformed input '" + std::string(s) + "'");
    Rational x = parse_rational(str.substr(0, sep));
    Rational y = parse_rational(str.substr(sep + 1));
    if (str[sep] == '-') y = -y;
    return {field, x, y};
}

std::optional<QuadRational> sqrt_in_field(const QuadRational& u) {
    const QuadField& f = u.field();
    const Rational a(f.a), n(f.n), D(static_cast<long>(f.D));
    const Rational& u0 = u.x();
    const Rational& u1 = u.y();

    // y = 0 branch: u must be a rational square.
    if (u1.is_zero()) {
        if (auto r = sqrt_in_field(u0)) return QuadRational(f, *r, Rational(0));
    }

    // y != 0: T = y^2 satisfies D T^2 - 2(a u1 + 2 u0) T + u1^2 = 0.
    Rational bb = a * u1 + Rational(2) * u0;
    Rational disc = bb * bb - D * u1 * u1;
    auto sd = sqrt_in_field(disc);
    if (!sd) return std::nullopt;
    for (int sign : {+1, -1}) {
        Rational T = (bb + Rational(sign) * *sd) / D;
        if (T.sign() <= 0) continue;
        auto yr = sqrt_in_field(T);
        if (!yr) continue;
        Rational y = *yr;  // positive root
        Rational x = (u1 - a * T) / (Rational(2) * y);
        QuadRational w(f, x, y);
        if (w * w == u) return w;
    }
    return std::nullopt;
}

}  // namespace quadper
