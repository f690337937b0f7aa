// Bounded-height search driver: enumerate c over Q or a quadratic field,
// discard c that cannot have periodic points (denominator filters), classify
// the rest through the type sieve with per-prime refinement, and certify any
// residual case with the exact orbit oracle.  Runs are deterministic for a
// fixed config regardless of worker count, and can checkpoint/resume.
#pragma once

#include "quadper/oracle.hpp"
#include "quadper/sieve.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace quadper {

struct SearchConfig {
    long long D = 0;         // 0 = Q, otherwise a fundamental discriminant
    long long B = 100;       // non-logarithmic height bound: H(c) <= B
    uint32_t M = 3;          // period bound under test
    int initial_primes = 0;  // sieve size; 0 = default (5 over Q, 4 over K)
    int refine_limit = 60;   // additional primes before the oracle is invoked
    int threads = 1;
    std::string checkpoint_path;
    std::string report_path;
    std::string sieve_cache_path;
    bool manual = false;       // list refinement survivors instead of running the oracle
    long long max_blocks = -1; // stop after this many blocks (testing hook)
};

enum class VerdictKind : int {
    FilteredNoPeriodic = 0,
    TypeGood = 1,
    RefinedGood = 2,
    Confirmed = 3,
    Counterexample = 4,
    Flagged = 5,
    OracleFailure = 6,
};
constexpr int kVerdictKinds = 7;
const char* verdict_name(VerdictKind v);

struct CycleRecord {
    uint64_t period = 0;
    std::vector<std::string> points;  // canonical renderings, orbit order
};

struct CaseRecord {
    std::string c;
    long long field = 0;  // discriminant, 0 for Q
    VerdictKind verdict = VerdictKind::TypeGood;
    uint32_t primes_used = 0;
    std::vector<uint64_t> residual_periods;
    std::vector<uint64_t> certified_periods;
    std::vector<CycleRecord> cycles;
    std::string diagnostic;
};

struct RunReport {
    SearchConfig config;
    uint64_t config_hash = 0;
    uint64_t total_candidates = 0;  // all c with H(c) <= B
    uint64_t enumerated = 0;        // candidates passing the denominator filter
    std::array<uint64_t, kVerdictKinds> counts{};
    uint32_t max_primes_used = 0;
    std::vector<CaseRecord> records;             // enumeration order
    std::vector<uint64_t> certified_periods;     // sorted, unique, oracle-backed
    uint64_t blocks_total = 0;
    uint64_t blocks_done = 0;
    bool complete = false;
    int exit_code = 2;
};

/// True iff the denominator is a perfect square (c reduced).
bool square_denominator_filter(const Rational& c);

/// lcm of the coordinate denominators must be a square ideal: every prime with
/// odd multiplicity must ramify (divide D).
bool square_ideal_filter(const QuadRational& c);

/// Number of reduced p/q with max(|p|, q) <= B.
uint64_t count_height_le(long long B);

/// All reduced p/q with max(|p|, q) <= B, ordered by height, then numerator,
/// then denominator.  With square_den_only, only square denominators.
std::vector<Rational> enumerate_q(long long B, bool square_den_only);

/// All x + y*w with both coordinate heights <= B passing square_ideal_filter,
/// ordered by (den(x), den(y)) blocks, then numerators.
std::vector<QuadRational> enumerate_k(const QuadField& field, long long B);

uint64_t config_hash(const SearchConfig& config);

/// Per-case classification against a prepared context (sieve + refinement
/// pool).  Exposed for tests; run_verification drives the bulk path.
class VerifyContext;
CaseRecord verify_c(const Rational& c, VerifyContext& ctx);
CaseRecord verify_c(const QuadRational& c, VerifyContext& ctx);

class VerifyContext {
public:
    /// Builds the sieve (bound min(M,3)) and the refinement prime pool.
    explicit VerifyContext(const SearchConfig& config);

    const SieveTable& sieve() const { return *sieve_; }
    const SearchConfig& config() const { return cfg_; }
    const std::optional<QuadField>& field() const { return field_; }
    const std::vector<PrimeDesc>& refinement_pool() const { return *pool_; }

    /// Possible periods at pool prime i for the given reduced parameter,
    /// memoized per residue (the full table is never materialized).
    const PosPerSet& pool_posper(size_t i, const ProjPoint& pt);

    /// Worker-local clone sharing the immutable sieve and pool, with its own
    /// memo cache.
    VerifyContext fork() const;

private:
    SearchConfig cfg_;
    std::optional<QuadField> field_;
    std::shared_ptr<const SieveTable> sieve_;
    std::shared_ptr<const std::vector<PrimeDesc>> pool_;
    std::vector<std::unordered_map<uint64_t, PosPerSet>> cache_;  // per pool prime
};

RunReport run_verification(const SearchConfig& config);

/// JSONL: one header line, one line per non-trivial case, one summary line.
void write_report(const RunReport& report, std::ostream& out);

}  // namespace quadper
