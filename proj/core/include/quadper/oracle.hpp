// Exact computation of all K-rational periodic and preperiodic points of
// z^2 + c.  Candidates live on a lattice pinned by the denominator of c (a
// periodic point has valuation v(c)/2 wherever v(c) < 0) and are boxed by the
// archimedean escape radius R = (1 + sqrt(1 + 4|c|))/2.  Classification is by
// exact forward iteration: an orbit either returns, revisits a non-initial
// point, or leaves the lattice box, and leaving proves non-periodicity.
#pragma once

#include "quadper/quadfield.hpp"
#include "quadper/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace quadper {

/// Raised when the candidate set exceeds the enumeration cap; never silently
/// truncated.
struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr uint64_t kOracleCandidateCap = 10'000'000;

template <class E>
struct OrbitCertificate {
    E c;
    /// Every K-rational periodic point with its exact period.
    std::vector<std::pair<E, uint64_t>> periodic;
    /// Filled by preperiodic_closure: all affine preperiodic points with the
    /// number of steps to reach the periodic set (0 for periodic points).
    std::vector<std::pair<E, uint32_t>> preperiodic;
    bool closure_computed = false;
};

/// Escape radius from the max of |c| over the archimedean embeddings; any
/// periodic point has every embedding within it.
double northcott_bound(const Rational& c);
double northcott_bound(const QuadRational& c);

/// All periodic points with exact periods.  Detection is exact and complete;
/// max_period only sizes internal reserves (periods above it are still found
/// and reported, never dropped).
OrbitCertificate<Rational> find_periodic_points(const Rational& c, uint32_t max_period);
OrbitCertificate<QuadRational> find_periodic_points(const QuadRational& c, uint32_t max_period);

/// Exact period of alpha, or nullopt if alpha is not periodic.
std::optional<uint64_t> exact_period(const Rational& c, const Rational& alpha);
std::optional<uint64_t> exact_period(const QuadRational& c, const QuadRational& alpha);

/// Periodic points plus the full backward closure under K-rational preimages
/// (z^2 = y - c), with tail lengths.  The point at infinity is a fixed point
/// and is not listed; reports count it separately.
OrbitCertificate<Rational> preperiodic_closure(const Rational& c);
OrbitCertificate<QuadRational> preperiodic_closure(const QuadRational& c);

/// Group the periodic points of a certificate into cycles in orbit order.
std::vector<std::vector<Rational>> group_cycles(const OrbitCertificate<Rational>& cert);
std::vector<std::vector<QuadRational>> group_cycles(const OrbitCertificate<QuadRational>& cert);

}  // namespace quadper
