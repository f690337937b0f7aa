// S-types (tuples of residues of c at a fixed list of primes), the per-prime
// possible-period tables, and the bad-type set: types whose intersected
// possible periods are not contained in {1..M}.  Built incrementally, pruning
// any partial type whose running intersection is already within the bound, so
// the full product of types is never materialized.
#pragma once

#include "quadper/periods.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace quadper {

/// Coordinates are extended indices in [0, q_i], with q_i = the infinity slot.
struct SType {
    std::vector<uint64_t> coords;
    friend bool operator==(const SType&, const SType&) = default;
};

struct SieveStatsRow {
    int N = 0;
    uint64_t bad_count = 0;
    uint64_t total_types = 0;
    double proportion = 0.0;
};

class SieveTable {
public:
    SieveTable(std::vector<PrimeDesc> S, uint32_t M);

    const std::vector<PrimeDesc>& primes() const { return S_; }
    uint32_t period_bound() const { return M_; }
    long long field_disc() const { return D_; }

    uint64_t total_types() const { return total_; }
    uint64_t bad_count() const { return bad_keys_.size(); }
    /// Frontier size after each prime: bad counts of the length-k prefixes.
    const std::vector<uint64_t>& level_bad_counts() const { return level_bad_; }

    bool is_bad_key(uint64_t key) const;
    bool is_bad(const SType& T) const;
    const std::vector<uint64_t>& bad_keys() const { return bad_keys_; }

    const std::vector<PosPerSet>& prime_table(size_t i) const { return tables_[i]; }
    /// Intersection of the per-coordinate possible-period sets of T.
    PosPerSet type_posper(const SType& T) const;

    uint64_t key_of(const SType& T) const;
    SType type_from_key(uint64_t key) const;
    uint64_t stride(size_t i) const { return strides_[i]; }

private:
    friend std::optional<SieveTable> load_sieve_cache(const std::string&, long long,
                                                      std::span<const PrimeDesc>, uint32_t);
    friend SieveTable build_sieve(std::vector<PrimeDesc> S, uint32_t M);
    void finalize_bad(std::vector<uint64_t> keys);

    std::vector<PrimeDesc> S_;
    uint32_t M_;
    long long D_;
    std::vector<std::vector<PosPerSet>> tables_;
    std::vector<uint64_t> strides_;
    uint64_t total_ = 0;
    std::vector<uint64_t> level_bad_;
    std::vector<uint64_t> bad_keys_;       // sorted
    std::vector<uint8_t> bitmap_;          // dense membership when total_ is small
    bool use_bitmap_ = false;
};

/// Possible-period set for each of the q affine residues plus the infinity
/// slot (always All) at index q.
std::vector<PosPerSet> build_prime_table(const PrimeDesc& P);

SieveTable build_sieve(std::vector<PrimeDesc> S, uint32_t M);

SType stype_of(const Rational& c, std::span<const PrimeDesc> S);
SType stype_of(const QuadRational& c, std::span<const PrimeDesc> S);

/// Mixed-radix key, sum of coord_i * prod_{j<i} (q_j + 1); injective.
uint64_t type_key(std::span<const PrimeDesc> S, const SType& T);

/// All primes above the first N rational primes (ascending p, then index);
/// over Q (field absent) the degenerate rational primes.
std::vector<PrimeDesc> sieve_primes(const std::optional<QuadField>& field, int N);

/// Rows for S = sieve_primes(field, N), N = 1..N_max.
std::vector<SieveStatsRow> sieve_stats(const std::optional<QuadField>& field, uint32_t M,
                                       int N_max);

/// Binary cache of the bad-key set, keyed by (D, S, M).  Loading validates the
/// key and rebuilds the per-prime tables; any mismatch or corruption yields
/// nullopt (callers rebuild silently).
bool save_sieve_cache(const SieveTable& table, const std::string& path);
std::optional<SieveTable> load_sieve_cache(const std::string& path, long long D,
                                           std::span<const PrimeDesc> S, uint32_t M);

}  // namespace quadper
