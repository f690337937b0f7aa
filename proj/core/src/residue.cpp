#include "quadper/residue.hpp"

#include <stdexcept>

namespace quadper {

namespace {

constexpr uint32_t kPrimeCap = 1u << 16;

bool is_prime_u32(uint32_t p) {
    if (p < 2) return false;
    for (uint32_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

void require_prime(uint32_t p) {
    if (!is_prime_u32(p)) throw std::invalid_argument("not a prime: " + std::to_string(p));
    if (p >= kPrimeCap) throw std::invalid_argument("prime exceeds the 2^16 residue cap");
}

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) { return a * b % p; }

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t p) {
    uint64_t r = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, p);
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    return r;
}

uint64_t invmod(uint64_t a, uint64_t p) {
    if (a % p == 0) throw std::domain_error("residue inverse of zero");
    return powmod(a, p - 2, p);
}

uint32_t llmod(long long v, uint32_t p) {
    long long r = v % static_cast<long long>(p);
    if (r < 0) r += p;
    return static_cast<uint32_t>(r);
}

uint32_t mpz_mod_u32(const Int& v, uint32_t p) {
    return static_cast<uint32_t>(mpz_fdiv_ui(v.get_mpz_t(), p));
}

// v_p of a nonzero integer.
long long int_valuation(const Int& v, uint32_t p) {
    Int tmp;
    return static_cast<long long>(
        mpz_remove(tmp.get_mpz_t(), v.get_mpz_t(), Int(static_cast<unsigned long>(p)).get_mpz_t()));
}

}  // namespace

int kronecker_symbol(long long D, uint32_t p) {
    if (p == 2) {
        long long r = ((D % 8) + 8) % 8;
        if (r % 2 == 0) return 0;
        return (r == 1 || r == 7) ? 1 : -1;
    }
    uint32_t d = llmod(D, p);
    if (d == 0) return 0;
    uint64_t ls = powmod(d, (p - 1) / 2, p);
    return ls == 1 ? 1 : -1;
}

PrimeKind splitting_type(const QuadField& field, uint32_t p) {
    require_prime(p);
    int k = kronecker_symbol(field.D, p);
    if (k == 1) return PrimeKind::Split;
    if (k == -1) return PrimeKind::Inert;
    return PrimeKind::Ramified;
}

PrimeDesc rational_prime(uint32_t p) {
    require_prime(p);
    PrimeDesc P;
    P.p = p;
    P.kind = PrimeKind::Rational;
    P.q = p;
    return P;
}

std::vector<PrimeDesc> primes_above(const QuadField& field, uint32_t p) {
    PrimeKind kind = splitting_type(field, p);
    PrimeDesc base;
    base.p = p;
    base.kind = kind;
    base.D = field.D;
    base.a_mod = llmod(field.a, p);
    base.n_mod = llmod(field.n, p);

    // Roots of T^2 - aT + n mod p, found by direct scan (p < 2^16).
    std::vector<uint32_t> roots;
    for (uint64_t t = 0; t < p; ++t) {
        uint64_t val = (t * t + base.n_mod) % p;
        if (val == mulmod(base.a_mod, t, p)) roots.push_back(static_cast<uint32_t>(t));
    }

    std::vector<PrimeDesc> out;
    switch (kind) {
        case PrimeKind::Split: {
            if (roots.size() != 2) throw std::logic_error("split prime without two roots");
            for (uint8_t i = 0; i < 2; ++i) {
                PrimeDesc P = base;
                P.index = i;
                P.t = roots[i];
                P.f = 1;
                P.e = 1;
                P.q = p;
                out.push_back(P);
            }
            break;
        }
        case PrimeKind::Ramified: {
            if (roots.size() != 1) throw std::logic_error("ramified prime without a double root");
            PrimeDesc P = base;
            P.t = roots[0];
            P.f = 1;
            P.e = 2;
            P.q = p;
            out.push_back(P);
            break;
        }
        case PrimeKind::Inert: {
            if (!roots.empty()) throw std::logic_error("inert prime with a root");
            PrimeDesc P = base;
            P.f = 2;
            P.e = 1;
            P.q = static_cast<uint64_t>(p) * p;
            out.push_back(P);
            break;
        }
        case PrimeKind::Rational:
            throw std::logic_error("unreachable");
    }
    return out;
}

ResidueElem res_zero() { return {0, 0}; }
ResidueElem res_one() { return {1, 0}; }

ResidueElem res_scalar(const PrimeDesc& P, uint64_t v) {
    return {static_cast<uint32_t>(v % P.p), 0};
}

ResidueElem res_add(const PrimeDesc& P, ResidueElem a, ResidueElem b) {
    return {static_cast<uint32_t>((static_cast<uint64_t>(a.u0) + b.u0) % P.p),
            static_cast<uint32_t>((static_cast<uint64_t>(a.u1) + b.u1) % P.p)};
}

ResidueElem res_neg(const PrimeDesc& P, ResidueElem a) {
    return {a.u0 ? P.p - a.u0 : 0, a.u1 ? P.p - a.u1 : 0};
}

ResidueElem res_sub(const PrimeDesc& P, ResidueElem a, ResidueElem b) {
    return res_add(P, a, res_neg(P, b));
}

ResidueElem res_mul(const PrimeDesc& P, ResidueElem a, ResidueElem b) {
    const uint64_t p = P.p;
    if (P.f == 1) return {static_cast<uint32_t>(mulmod(a.u0, b.u0, p)), 0};
    // (a0 + a1 w)(b0 + b1 w) with w^2 = a_mod*w - n_mod
    uint64_t yy = mulmod(a.u1, b.u1, p);
    uint64_t u0 = (mulmod(a.u0, b.u0, p) + mulmod(yy, p - P.n_mod % p, p)) % p;
    uint64_t u1 = (mulmod(a.u0, b.u1, p) + mulmod(a.u1, b.u0, p) + mulmod(yy, P.a_mod, p)) % p;
    return {static_cast<uint32_t>(u0), static_cast<uint32_t>(u1)};
}

ResidueElem res_inv(const PrimeDesc& P, ResidueElem a) {
    if (res_is_zero(a)) throw std::domain_error("residue inverse of zero");
    const uint64_t p = P.p;
    if (P.f == 1) return {static_cast<uint32_t>(invmod(a.u0, p)), 0};
    // z^-1 = zbar / N(z), with zbar = (u0 + a*u1) - u1 w
    uint64_t nz = (mulmod(a.u0, a.u0, p) + mulmod(mulmod(P.a_mod, a.u0, p), a.u1, p) +
                   mulmod(mulmod(P.n_mod, a.u1, p), a.u1, p)) % p;
    uint64_t ni = invmod(nz, p);
    ResidueElem conj = {static_cast<uint32_t>((a.u0 + mulmod(P.a_mod, a.u1, p)) % p),
                        a.u1 ? static_cast<uint32_t>(p - a.u1) : 0};
    return {static_cast<uint32_t>(mulmod(conj.u0, ni, p)),
            static_cast<uint32_t>(mulmod(conj.u1, ni, p))};
}

ResidueElem res_pow(const PrimeDesc& P, ResidueElem a, uint64_t k) {
    ResidueElem r = res_one();
    while (k) {
        if (k & 1) r = res_mul(P, r, a);
        a = res_mul(P, a, a);
        k >>= 1;
    }
    return r;
}

uint64_t elem_index(const PrimeDesc& P, ResidueElem a) {
    return a.u0 + static_cast<uint64_t>(a.u1) * P.p;
}

ResidueElem elem_from_index(const PrimeDesc& P, uint64_t idx) {
    return {static_cast<uint32_t>(idx % P.p), static_cast<uint32_t>(idx / P.p)};
}

uint64_t ext_index(const PrimeDesc& P, const ProjPoint& pt) {
    return pt.infinity ? P.q : elem_index(P, pt.value);
}

ProjPoint reduce_c(const Rational& c, const PrimeDesc& P) {
    const uint32_t p = P.p;
    // Reduced fraction: p | den <=> negative valuation.
    if (mpz_mod_u32(c.den(), p) == 0) return proj_infinity();
    uint64_t num = mpz_mod_u32(c.num(), p);
    uint64_t den = mpz_mod_u32(c.den(), p);
    return proj_affine({static_cast<uint32_t>(mulmod(num, invmod(den, p), p)), 0});
}

namespace {

// Common-denominator form of a quadratic element: c = (A + B w)/E, E > 0.
struct ZForm {
    Int A, B, E;
};

ZForm common_denominator(const QuadRational& c) {
    ZForm z;
    z.E = lcm(c.x().den(), c.y().den());
    z.A = c.x().num() * (z.E / c.x().den());
    z.B = c.y().num() * (z.E / c.y().den());
    return z;
}

// N(A + B w) = A^2 + a A B + n B^2, exact.
Int zform_norm(const QuadField& f, const Int& A, const Int& B) {
    return A * A + static_cast<long>(f.a) * A * B + static_cast<long>(f.n) * B * B;
}

QuadField field_of(const PrimeDesc& P) {
    QuadField f;
    f.D = P.D;
    f.a = (((P.D % 4) + 4) % 4 == 1) ? 1 : 0;
    f.n = (static_cast<long long>(f.a) * f.a - P.D) / 4;
    return f;
}

}  // namespace

ProjPoint reduce_c(const QuadRational& c, const PrimeDesc& P) {
    if (P.kind == PrimeKind::Rational)
        throw std::invalid_argument("reduce_c: quadratic element at a prime of Q");
    if (c.field().D != P.D) throw std::invalid_argument("reduce_c: field mismatch");
    const uint32_t p = P.p;
    const QuadField fld = c.field();

    ZForm z = common_denominator(c);
    // Strip the common power of p; valuation is unchanged by rational scaling.
    long long k = int_valuation(z.E, p);
    if (sgn(z.A) != 0) k = std::min(k, int_valuation(z.A, p));
    if (sgn(z.B) != 0) k = std::min(k, int_valuation(z.B, p));
    if (k > 0) {
        Int pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(k));
        z.A /= pk;
        z.B /= pk;
        z.E /= pk;
    }
    long long m = int_valuation(z.E, p);

    if (m == 0) {
        uint64_t einv = invmod(mpz_mod_u32(z.E, p), p);
        uint64_t am = mpz_mod_u32(z.A, p), bm = mpz_mod_u32(z.B, p);
        if (P.f == 2) {
            return proj_affine({static_cast<uint32_t>(mulmod(am, einv, p)),
                                static_cast<uint32_t>(mulmod(bm, einv, p))});
        }
        uint64_t r = (am + mulmod(bm, P.t, p)) % p;
        return proj_affine({static_cast<uint32_t>(mulmod(r, einv, p)), 0});
    }

    // m >= 1: the denominator still carries p after stripping, so at least one
    // of A, B is a p-unit and cancellation depends on the splitting behavior.
    switch (P.kind) {
        case PrimeKind::Inert:
            // v(A + Bw) = min(v_p(A), v_p(B)) = 0 < m.
            return proj_infinity();
        case PrimeKind::Split: {
            uint64_t dt = (mpz_mod_u32(z.A, p) + mulmod(mpz_mod_u32(z.B, p), P.t, p)) % p;
            if (dt != 0) return proj_infinity();  // v_P(A + Bw) = 0 < m
            Int N = zform_norm(fld, z.A, z.B);
            long long w = int_valuation(N, p);  // = v_P(A + Bw), conjugate prime is coprime
            if (w < m) return proj_infinity();
            if (w > m) return proj_affine({0, 0});
            // c = N(z) / (E * zbar); both factors are p-units after dividing p^m out of N and E.
            Int pm;
            mpz_ui_pow_ui(pm.get_mpz_t(), p, static_cast<unsigned long>(m));
            uint64_t numr = mpz_mod_u32(Int(N / pm), p);
            uint32_t tconj = static_cast<uint32_t>((P.a_mod + p - P.t % p) % p);
            uint64_t zbar = (mpz_mod_u32(z.A, p) + mulmod(mpz_mod_u32(z.B, p), tconj, p)) % p;
            uint64_t denr = mulmod(mpz_mod_u32(Int(z.E / pm), p), zbar, p);
            return proj_affine({static_cast<uint32_t>(mulmod(numr, invmod(denr, p), p)), 0});
        }
        case PrimeKind::Ramified: {
            Int N = zform_norm(fld, z.A, z.B);
            long long w = int_valuation(N, p);  // v_P(A + Bw) = v_p(N)
            if (w < 2 * m) return proj_infinity();
            if (w > 2 * m) return proj_affine({0, 0});
            // v_P(z) = 2m means z is divisible by p^m in O_K, coordinatewise.
            Int pm;
            mpz_ui_pow_ui(pm.get_mpz_t(), p, static_cast<unsigned long>(m));
            uint64_t a0 = mpz_mod_u32(Int(z.A / pm), p);
            uint64_t b0 = mpz_mod_u32(Int(z.B / pm), p);
            uint64_t e0 = mpz_mod_u32(Int(z.E / pm), p);
            uint64_t r = (a0 + mulmod(b0, P.t, p)) % p;
            return proj_affine({static_cast<uint32_t>(mulmod(r, invmod(e0, p), p)), 0});
        }
        case PrimeKind::Rational:
            break;
    }
    throw std::logic_error("unreachable");
}

long long valuation(const Rational& c, const PrimeDesc& P) {
    if (c.is_zero()) return kValInfinity;
    long long v = int_valuation(c.num(), P.p) - int_valuation(c.den(), P.p);
    return v * static_cast<long long>(P.e);
}

long long valuation(const QuadRational& c, const PrimeDesc& P) {
    if (P.kind == PrimeKind::Rational)
        throw std::invalid_argument("valuation: quadratic element at a prime of Q");
    if (c.is_zero()) return kValInfinity;
    const uint32_t p = P.p;
    ZForm z = common_denominator(c);
    long long ve = int_valuation(z.E, p) * static_cast<long long>(P.e);

    // v_P(A + B w):
    long long s = kValInfinity;
    if (sgn(z.A) != 0) s = int_valuation(z.A, p);
    if (sgn(z.B) != 0) s = std::min(s, int_valuation(z.B, p));
    Int pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(s));
    Int A = z.A / pk, B = z.B / pk;

    long long vz;
    switch (P.kind) {
        case PrimeKind::Inert:
            vz = s;  // e = 1, and p divides (A + Bw) only coordinatewise
            break;
        case PrimeKind::Ramified:
            vz = 2 * s + int_valuation(zform_norm(field_of(P), A, B), p);
            break;
        case PrimeKind::Split: {
            uint64_t dt = (mpz_mod_u32(A, p) + mulmod(mpz_mod_u32(B, p), P.t, p)) % p;
            if (dt != 0) {
                vz = s;
            } else {
                // The conjugate prime does not divide A + Bw (not both coords
                // divisible), so the full p-power of the norm sits at P.
                vz = s + int_valuation(zform_norm(field_of(P), A, B), p);
            }
            break;
        }
        default:
            throw std::logic_error("unreachable");
    }
    return vz - ve;
}

}  // namespace quadper
