// Primes of O_K above a rational prime p, residue fields F_p and F_p^2, and
// reduction of field elements into P^1 of the residue field.  An element
// reduces to the point at infinity exactly when its valuation at the prime is
// negative (bad reduction, for the parameter of z^2 + c).
#pragma once

#include "quadper/quadfield.hpp"
#include "quadper/rational.hpp"

#include <cstdint>
#include <vector>

namespace quadper {

enum class PrimeKind : uint8_t { Rational, Split, Inert, Ramified };

/// A prime of the ground field's ring of integers, with enough residue data
/// to do all arithmetic without returning to the number field:
///   f = residue degree (q = p^f), e = ramification index,
///   t = image of w in F_p (meaningful for Split/Ramified),
///   index = which of the two primes above a split p (0 = smaller root t).
/// For the ground field Q, kind = Rational and f = e = 1.
struct PrimeDesc {
    uint32_t p = 0;
    PrimeKind kind = PrimeKind::Rational;
    uint8_t index = 0;
    uint32_t f = 1;
    uint32_t e = 1;
    uint32_t t = 0;
    uint64_t q = 0;       // p^f
    long long D = 0;      // 0 for Q
    uint32_t a_mod = 0;   // field a mod p
    uint32_t n_mod = 0;   // field n mod p

    uint64_t norm() const { return q; }
};

/// Element of the residue field, coordinates in the basis {1, wbar}.
/// u1 = 0 always when f = 1.
struct ResidueElem {
    uint32_t u0 = 0;
    uint32_t u1 = 0;
    friend bool operator==(const ResidueElem&, const ResidueElem&) = default;
};

struct ProjPoint {
    bool infinity = false;
    ResidueElem value;
};

inline ProjPoint proj_infinity() { return {true, {}}; }
inline ProjPoint proj_affine(ResidueElem e) { return {false, e}; }

/// Kronecker symbol (D|p) for p prime: +1 split, -1 inert, 0 ramified.
int kronecker_symbol(long long D, uint32_t p);

PrimeKind splitting_type(const QuadField& field, uint32_t p);

/// The degenerate prime of Q below p.
PrimeDesc rational_prime(uint32_t p);

/// The primes of O_K above p: one (Inert, Ramified) or two (Split, ordered by
/// ascending root t).  Primes are capped at p < 2^16.
std::vector<PrimeDesc> primes_above(const QuadField& field, uint32_t p);

// Residue-field arithmetic.  All operands must live in the same field.
ResidueElem res_zero();
ResidueElem res_one();
ResidueElem res_scalar(const PrimeDesc& P, uint64_t v);  // v mod p, in the prime subfield
ResidueElem res_add(const PrimeDesc& P, ResidueElem a, ResidueElem b);
ResidueElem res_sub(const PrimeDesc& P, ResidueElem a, ResidueElem b);
ResidueElem res_neg(const PrimeDesc& P, ResidueElem a);
ResidueElem res_mul(const PrimeDesc& P, ResidueElem a, ResidueElem b);
/// Throws std::domain_error on zero.
ResidueElem res_inv(const PrimeDesc& P, ResidueElem a);
ResidueElem res_pow(const PrimeDesc& P, ResidueElem a, uint64_t k);
inline bool res_is_zero(ResidueElem a) { return a.u0 == 0 && a.u1 == 0; }

/// Dense index u0 + u1*p, a bijection onto [0, q).
uint64_t elem_index(const PrimeDesc& P, ResidueElem a);
ResidueElem elem_from_index(const PrimeDesc& P, uint64_t idx);
/// Index into [0, q], with q encoding the point at infinity.
uint64_t ext_index(const PrimeDesc& P, const ProjPoint& pt);

/// Reduction P^1(K) -> P^1(O_K/P): infinity iff the valuation of c at P is
/// negative, otherwise the affine residue (denominator cancellation handled
/// exactly, including at split and ramified primes).
ProjPoint reduce_c(const Rational& c, const PrimeDesc& P);
ProjPoint reduce_c(const QuadRational& c, const PrimeDesc& P);

constexpr long long kValInfinity = 1LL << 60;  // valuation of zero

/// v_P, normalized surjective onto Z (so v_P(p) = e).
long long valuation(const Rational& c, const PrimeDesc& P);
long long valuation(const QuadRational& c, const PrimeDesc& P);

}  // namespace quadper
