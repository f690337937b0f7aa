// Cycle structure of z -> z^2 + c over a residue field, multipliers and their
// multiplicative orders, and the finite set of exact periods a global point
// can have given that reduction data: every cycle of period m with multiplier
// of order r contributes m, m*r, and m*r*p^e for p^(e-1) <= 2*e(P)/(p-1).
#pragma once

#include "quadper/residue.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace quadper {

struct CycleInfo {
    std::vector<ResidueElem> points;  // in orbit order
    uint64_t m = 0;                   // exact period = points.size()
    ResidueElem lambda;               // product of 2*z over the cycle
    std::optional<uint64_t> r;        // order of lambda in k*, absent iff lambda = 0
};

/// Either a finite set of positive integers or All (= N, from bad reduction).
class PosPerSet {
public:
    static PosPerSet all() { PosPerSet s; s.all_ = true; return s; }
    static PosPerSet finite(std::vector<uint64_t> elems);

    bool is_all() const { return all_; }
    const std::vector<uint64_t>& elements() const { return elems_; }  // sorted, unique
    bool contains(uint64_t n) const;
    /// True iff finite and every element is <= bound (the empty set qualifies).
    bool within_bound(uint64_t bound) const;
    size_t size() const { return elems_.size(); }

    friend PosPerSet intersect(const PosPerSet& a, const PosPerSet& b);
    friend bool operator==(const PosPerSet&, const PosPerSet&) = default;

private:
    bool all_ = false;
    std::vector<uint64_t> elems_;
};

PosPerSet posper_intersect(std::span<const PosPerSet> sets);

/// Every cycle of the functional graph of z -> z^2 + c_tilde on the q affine
/// residues, each exactly once, in O(q).
std::vector<CycleInfo> cycle_decomposition(const PrimeDesc& P, ResidueElem c_tilde);

/// Derivative of the m-fold iterate along the cycle: product of 2*z.
ResidueElem multiplier(const PrimeDesc& P, std::span<const ResidueElem> cycle);

/// Order of lambda in the cyclic group k*; nullopt iff lambda = 0.
std::optional<uint64_t> mult_order(const PrimeDesc& P, ResidueElem lambda);

/// All if c reduces to infinity (bad reduction), else the union over cycles
/// of the Lemma-style period candidates.
PosPerSet possible_periods(const PrimeDesc& P, const ProjPoint& c_proj);

}  // namespace quadper
