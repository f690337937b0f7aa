#include "quadper/driver.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace quadper {

using nlohmann::json;

const char* verdict_name(VerdictKind v) {
    switch (v) {
        case VerdictKind::FilteredNoPeriodic: return "filtered-no-periodic";
        case VerdictKind::TypeGood: return "type-good";
        case VerdictKind::RefinedGood: return "refined-good";
        case VerdictKind::Confirmed: return "confirmed";
        case VerdictKind::Counterexample: return "counterexample";
        case VerdictKind::Flagged: return "flagged";
        case VerdictKind::OracleFailure: return "oracle-failure";
    }
    return "?";
}

namespace {

VerdictKind verdict_from_name(const std::string& s) {
    for (int i = 0; i < kVerdictKinds; ++i) {
        VerdictKind v = static_cast<VerdictKind>(i);
        if (s == verdict_name(v)) return v;
    }
    throw std::runtime_error("unknown verdict name: " + s);
}

}  // namespace

bool square_denominator_filter(const Rational& c) { return is_perfect_square(c.den()); }

bool square_ideal_filter(const QuadRational& c) {
    Int l = lcm(c.x().den(), c.y().den());
    const Int D(static_cast<long>(c.field().D));
    // Every prime with odd multiplicity in the lcm must ramify (divide D).
    for (Int p = 2; p * p <= l; p = (p == 2) ? Int(3) : Int(p + 2)) {
        if (!mpz_divisible_p(l.get_mpz_t(), p.get_mpz_t())) continue;
        int e = 0;
        while (mpz_divisible_p(l.get_mpz_t(), p.get_mpz_t())) {
            l /= p;
            ++e;
        }
        if (e % 2 == 1 && !mpz_divisible_p(D.get_mpz_t(), p.get_mpz_t())) return false;
    }
    if (cmp(l, 1) > 0 && !mpz_divisible_p(D.get_mpz_t(), l.get_mpz_t()))
        return false;  // leftover prime, multiplicity 1
    return true;
}

uint64_t count_height_le(long long B) {
    if (B < 1) return 0;
    std::vector<int32_t> spf(B + 1, 0);
    for (long long i = 2; i <= B; ++i) {
        if (spf[i] == 0)
            for (long long j = i; j <= B; j += i)
                if (spf[j] == 0) spf[j] = static_cast<int32_t>(i);
    }
    uint64_t total = 1;  // c = 0
    for (long long q = 1; q <= B; ++q) {
        std::vector<long long> ps;
        long long v = q;
        while (v > 1) {
            long long p = spf[v];
            ps.push_back(p);
            while (v % p == 0) v /= p;
        }
        // #{1 <= p <= B : gcd(p, q) = 1} by inclusion-exclusion
        long long cnt = 0;
        for (uint32_t mask = 0; mask < (1u << ps.size()); ++mask) {
            long long d = 1;
            int bits = 0;
            for (size_t i = 0; i < ps.size(); ++i)
                if (mask & (1u << i)) {
                    d *= ps[i];
                    ++bits;
                }
            cnt += (bits % 2 ? -1 : 1) * (B / d);
        }
        total += 2 * static_cast<uint64_t>(cnt);
    }
    return total;
}

namespace {

bool is_square_ll(long long v) {
    if (v < 0) return false;
    long long r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r * r == v;
}

// Items of the height-h block over Q: reduced p/q with max(|p|, q) = h,
// square q when filtering, ordered by numerator then denominator.
std::vector<std::pair<long long, long long>> q_block_items(long long h, bool square_only) {
    std::vector<std::pair<long long, long long>> items;
    for (long long q = 1; q < h; ++q) {
        if (square_only && !is_square_ll(q)) continue;
        if (std::gcd(h, q) == 1) {
            items.emplace_back(-h, q);
            items.emplace_back(h, q);
        }
    }
    if (!square_only || is_square_ll(h)) {
        for (long long p = -h; p <= h; ++p)
            if (std::gcd(std::llabs(p), h) == 1) items.emplace_back(p, h);
    }
    std::sort(items.begin(), items.end());
    return items;
}

}  // namespace

std::vector<Rational> enumerate_q(long long B, bool square_den_only) {
    std::vector<Rational> out;
    for (long long h = 1; h <= B; ++h)
        for (auto [p, q] : q_block_items(h, square_den_only)) out.emplace_back(p, q);
    return out;
}

namespace {

// Denominator pairs whose lcm is a square times ramified primes; every c with
// those coordinate denominators passes the square-ideal filter.
std::vector<std::pair<long long, long long>> admissible_pairs(const QuadField& f, long long B) {
    std::vector<std::pair<long long, long long>> pairs;
    for (long long q1 = 1; q1 <= B; ++q1) {
        for (long long q2 = 1; q2 <= B; ++q2) {
            long long l = q1 / std::gcd(q1, q2) * q2;
            bool ok = true;
            for (long long p = 2; p * p <= l && ok; ++p) {
                if (l % p) continue;
                int e = 0;
                while (l % p == 0) {
                    l /= p;
                    ++e;
                }
                if (e % 2 == 1 && f.D % p != 0) ok = false;
            }
            if (ok && l > 1 && f.D % l != 0) ok = false;  // leftover prime, multiplicity 1
            if (ok) pairs.emplace_back(q1, q2);
        }
    }
    return pairs;
}

std::vector<long long> coprime_numerators(long long B, long long q) {
    std::vector<long long> out;
    for (long long p = -B; p <= B; ++p)
        if (std::gcd(std::llabs(p), q) == 1) out.push_back(p);
    return out;
}

}  // namespace

std::vector<QuadRational> enumerate_k(const QuadField& field, long long B) {
    std::vector<QuadRational> out;
    for (auto [q1, q2] : admissible_pairs(field, B)) {
        for (long long p1 : coprime_numerators(B, q1))
            for (long long p2 : coprime_numerators(B, q2))
                out.emplace_back(field, Rational(p1, q1), Rational(p2, q2));
    }
    return out;
}

uint64_t config_hash(const SearchConfig& cfg) {
    std::ostringstream s;
    s << "D=" << cfg.D << "|B=" << cfg.B << "|M=" << cfg.M << "|N=" << cfg.initial_primes
      << "|R=" << cfg.refine_limit << "|manual=" << (cfg.manual ? 1 : 0);
    uint64_t h = 1469598103934665603ull;
    for (char ch : s.str()) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// VerifyContext
// ---------------------------------------------------------------------------

namespace {

// All prime descriptors beyond the first `skip` rational primes, in ascending
// norm (then p, then index), truncated to `limit`.
std::vector<PrimeDesc> build_refinement_pool(const std::optional<QuadField>& field, int skip,
                                             int limit) {
    std::vector<PrimeDesc> pool;
    auto by_norm = [](const PrimeDesc& a, const PrimeDesc& b) {
        if (a.norm() != b.norm()) return a.norm() < b.norm();
        if (a.p != b.p) return a.p < b.p;
        return a.index < b.index;
    };
    int seen = 0;
    for (uint32_t p = 2;; ++p) {
        bool prime = p >= 2;
        for (uint32_t d = 2; d * d <= p; ++d)
            if (p % d == 0) {
                prime = false;
                break;
            }
        if (!prime) continue;
        ++seen;
        if (seen <= skip) continue;
        if (field) {
            for (PrimeDesc P : primes_above(*field, p)) pool.push_back(P);
        } else {
            pool.push_back(rational_prime(p));
        }
        std::sort(pool.begin(), pool.end(), by_norm);
        // Later rational primes have norm >= p, so once the cutoff norm is
        // below p the prefix is final.
        if (static_cast<int>(pool.size()) >= limit && pool[limit - 1].norm() <= p) break;
    }
    pool.resize(limit);
    return pool;
}

}  // namespace

VerifyContext::VerifyContext(const SearchConfig& config) : cfg_(config) {
    if (cfg_.initial_primes <= 0) cfg_.initial_primes = (cfg_.D == 0) ? 5 : 4;
    if (cfg_.threads < 1) cfg_.threads = 1;
    if (cfg_.D != 0) field_ = make_field(cfg_.D);

    std::vector<PrimeDesc> S = sieve_primes(field_, cfg_.initial_primes);
    // Sieve bound: periods 1..3 occur in infinite families and are dismissed
    // cheaply; anything retaining a candidate period >= 4 is oracle-certified.
    uint32_t m_sieve = std::min<uint32_t>(cfg_.M, 3);

    std::optional<SieveTable> loaded;
    if (!cfg_.sieve_cache_path.empty())
        loaded = load_sieve_cache(cfg_.sieve_cache_path, cfg_.D, S, m_sieve);
    if (loaded) {
        sieve_ = std::make_shared<SieveTable>(std::move(*loaded));
    } else {
        sieve_ = std::make_shared<SieveTable>(build_sieve(S, m_sieve));
        if (!cfg_.sieve_cache_path.empty()) save_sieve_cache(*sieve_, cfg_.sieve_cache_path);
    }

    pool_ = std::make_shared<std::vector<PrimeDesc>>(
        build_refinement_pool(field_, cfg_.initial_primes, cfg_.refine_limit));
    cache_.resize(pool_->size());
}

VerifyContext VerifyContext::fork() const {
    VerifyContext copy = *this;
    copy.cache_.assign(pool_->size(), {});
    return copy;
}

const PosPerSet& VerifyContext::pool_posper(size_t i, const ProjPoint& pt) {
    uint64_t key = elem_index((*pool_)[i], pt.value);
    auto& memo = cache_[i];
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, possible_periods((*pool_)[i], pt)).first;
    return it->second;
}

// ---------------------------------------------------------------------------
// Per-case verification
// ---------------------------------------------------------------------------

namespace {

template <class E>
CaseRecord verify_impl(const E& c, const SType& T, VerifyContext& ctx) {
    const SearchConfig& cfg = ctx.config();
    const SieveTable& sieve = ctx.sieve();
    CaseRecord rec;
    rec.c = to_string(c);
    rec.field = cfg.D;
    rec.primes_used = static_cast<uint32_t>(sieve.primes().size());
    if (!sieve.is_bad(T)) {
        rec.verdict = VerdictKind::TypeGood;
        return rec;
    }

    PosPerSet run = sieve.type_posper(T);
    const auto& pool = ctx.refinement_pool();
    int consulted = 0;
    for (size_t i = 0; i < pool.size() && consulted < cfg.refine_limit; ++i) {
        if (!run.is_all() && run.within_bound(cfg.M)) break;
        ProjPoint pt = reduce_c(c, pool[i]);
        if (pt.infinity) continue;  // bad reduction contributes nothing
        ++consulted;
        run = intersect(run, ctx.pool_posper(i, pt));
    }
    rec.primes_used += static_cast<uint32_t>(consulted);
    if (!run.is_all()) rec.residual_periods = run.elements();

    // Residual periods 1..3 need no certificate (such cycles exist in infinite
    // families); a residual candidate >= 4 gets the exact oracle.
    uint64_t floor3 = std::min<uint64_t>(cfg.M, 3);
    if (!run.is_all() && run.within_bound(floor3)) {
        rec.verdict = VerdictKind::RefinedGood;
        return rec;
    }
    if (cfg.manual) {
        rec.verdict = VerdictKind::Flagged;
        return rec;
    }

    try {
        auto cert = find_periodic_points(c, cfg.M + 4);
        std::set<uint64_t> periods;
        uint64_t maxp = 0;
        for (const auto& cyc : group_cycles(cert)) {
            CycleRecord cr;
            cr.period = cyc.size();
            for (const auto& pt : cyc) cr.points.push_back(to_string(pt));
            periods.insert(cr.period);
            maxp = std::max(maxp, cr.period);
            rec.cycles.push_back(std::move(cr));
        }
        rec.certified_periods.assign(periods.begin(), periods.end());
        rec.verdict = maxp > cfg.M ? VerdictKind::Counterexample : VerdictKind::Confirmed;
    } catch (const OracleError& e) {
        rec.verdict = VerdictKind::OracleFailure;
        rec.diagnostic = e.what();
    }
    return rec;
}

}  // namespace

CaseRecord verify_c(const Rational& c, VerifyContext& ctx) {
    return verify_impl(c, stype_of(c, ctx.sieve().primes()), ctx);
}

CaseRecord verify_c(const QuadRational& c, VerifyContext& ctx) {
    return verify_impl(c, stype_of(c, ctx.sieve().primes()), ctx);
}

// ---------------------------------------------------------------------------
// Fast residue paths for the enumeration hot loop (no big integers).
// Cross-checked against reduce_c by the unit tests.
// ---------------------------------------------------------------------------

namespace {

using ll = long long;
using i128 = __int128;

uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t p) {
    uint64_t r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}
uint64_t invmod_u64(uint64_t a, uint64_t p) { return powmod_u64(a, p - 2, p); }

uint32_t mod_i128(i128 v, uint32_t p) {
    i128 r = v % p;
    if (r < 0) r += p;
    return static_cast<uint32_t>(r);
}

int val_i128(i128& v, uint32_t p) {  // divides out p, returns the exponent; v != 0
    int k = 0;
    while (v % p == 0) {
        v /= p;
        ++k;
    }
    return k;
}

// ext index of the reduction of p1/q1 + (p2/q2) w at P; mirrors reduce_c.
// Requires |p_i|, q_i small enough that norms fit in 128 bits.
uint64_t ext_index_ll(const PrimeDesc& P, ll p1, ll q1, ll p2, ll q2) {
    const uint32_t p = P.p;
    ll g = std::gcd(q1, q2);
    ll E0 = q1 / g * q2;
    i128 A = static_cast<i128>(p1) * (E0 / q1);
    i128 B = static_cast<i128>(p2) * (E0 / q2);
    i128 E = E0;

    // Strip min(v(A), v(B), v(E)); rational scaling leaves the reduction alone.
    int strip;
    {
        i128 t = E;
        strip = val_i128(t, p);
        if (A != 0) {
            t = A;
            strip = std::min(strip, val_i128(t, p));
        }
        if (B != 0) {
            t = B;
            strip = std::min(strip, val_i128(t, p));
        }
    }
    for (int i = 0; i < strip; ++i) {
        A /= p;
        B /= p;
        E /= p;
    }
    int m;
    {
        i128 t = E;
        m = val_i128(t, p);
    }

    if (m == 0) {
        uint64_t einv = invmod_u64(mod_i128(E, p), p);
        uint64_t am = mod_i128(A, p), bm = mod_i128(B, p);
        if (P.f == 2) {
            uint64_t u0 = am * einv % p, u1 = bm * einv % p;
            return u0 + u1 * static_cast<uint64_t>(p);
        }
        return (am + bm * P.t) % p * einv % p;
    }

    auto norm = [&]() -> i128 {
        QuadField f;
        f.D = P.D;
        f.a = (((P.D % 4) + 4) % 4 == 1) ? 1 : 0;
        f.n = (static_cast<long long>(f.a) * f.a - P.D) / 4;
        return A * A + static_cast<i128>(f.a) * A * B + static_cast<i128>(f.n) * B * B;
    };

    switch (P.kind) {
        case PrimeKind::Inert:
            return P.q;  // infinity
        case PrimeKind::Split: {
            uint64_t dt = (mod_i128(A, p) + static_cast<uint64_t>(mod_i128(B, p)) * P.t) % p;
            if (dt != 0) return P.q;
            i128 N = norm();
            int w = val_i128(N, p);  // N now divided by p^w
            if (w < m) return P.q;
            if (w > m) return 0;
            uint64_t numr = mod_i128(N, p);  // N / p^m mod p
            uint32_t tconj = static_cast<uint32_t>((P.a_mod + p - P.t % p) % p);
            uint64_t zbar = (mod_i128(A, p) + static_cast<uint64_t>(mod_i128(B, p)) * tconj) % p;
            i128 Ediv = E;
            for (int i = 0; i < m; ++i) Ediv /= p;
            uint64_t denr = mod_i128(Ediv, p) * zbar % p;
            return numr * invmod_u64(denr, p) % p;
        }
        case PrimeKind::Ramified: {
            i128 N = norm();
            int w = val_i128(N, p);
            if (w < 2 * m) return P.q;
            if (w > 2 * m) return 0;
            i128 Ad = A, Bd = B, Ed = E;
            for (int i = 0; i < m; ++i) {
                Ad /= p;
                Bd /= p;
                Ed /= p;
            }
            uint64_t r = (mod_i128(Ad, p) + static_cast<uint64_t>(mod_i128(Bd, p)) * P.t) % p;
            return r * invmod_u64(mod_i128(Ed, p), p) % p;
        }
        case PrimeKind::Rational:
            break;
    }
    throw std::logic_error("unreachable");
}

}  // namespace

// ---------------------------------------------------------------------------
// Block processing
// ---------------------------------------------------------------------------

namespace {

struct BlockResult {
    uint64_t enumerated = 0;
    std::array<uint64_t, kVerdictKinds> counts{};
    uint32_t max_primes_used = 0;
    std::vector<CaseRecord> records;
};

void absorb_record(BlockResult& out, CaseRecord rec) {
    out.counts[static_cast<int>(rec.verdict)]++;
    out.max_primes_used = std::max(out.max_primes_used, rec.primes_used);
    if (rec.verdict != VerdictKind::TypeGood) out.records.push_back(std::move(rec));
}

// One height class h over Q.
void process_q_block(long long h, VerifyContext& ctx, BlockResult& out) {
    auto items = q_block_items(h, true);
    out.enumerated += items.size();
    const auto& S = ctx.sieve().primes();

    struct QPlan {
        std::vector<std::pair<bool, uint64_t>> per_prime;  // (bad, inv(q) mod p)
    };
    std::unordered_map<long long, QPlan> plans;
    for (auto [p, q] : items) {
        if (plans.count(q)) continue;
        QPlan plan;
        for (const PrimeDesc& P : S) {
            if (q % P.p == 0)
                plan.per_prime.emplace_back(true, 0);
            else
                plan.per_prime.emplace_back(false, invmod_u64(q % P.p, P.p));
        }
        plans.emplace(q, std::move(plan));
    }

    for (auto [p, q] : items) {
        const QPlan& plan = plans[q];
        uint64_t key = 0;
        for (size_t i = 0; i < S.size(); ++i) {
            const PrimeDesc& P = S[i];
            uint64_t coord;
            if (plan.per_prime[i].first) {
                coord = P.q;
            } else {
                uint64_t pm = static_cast<uint64_t>(((p % P.p) + P.p) % P.p);
                coord = pm * plan.per_prime[i].second % P.p;
            }
            key += coord * ctx.sieve().stride(i);
        }
        if (!ctx.sieve().is_bad_key(key)) {
            out.counts[static_cast<int>(VerdictKind::TypeGood)]++;
            continue;
        }
        absorb_record(out, verify_c(Rational(p, q), ctx));
    }
}

// One admissible denominator pair (q1, q2) over K.
void process_k_block(const QuadField& field, long long B, long long q1, long long q2,
                     VerifyContext& ctx, BlockResult& out) {
    const auto& S = ctx.sieve().primes();
    auto n1 = coprime_numerators(B, q1);
    auto n2 = coprime_numerators(B, q2);
    out.enumerated += static_cast<uint64_t>(n1.size()) * n2.size();

    // int128 norms stay comfortably inside 128 bits at desk scales; otherwise
    // fall back to exact big-integer reduction per item.
    bool ll_ok = static_cast<i128>(B) * q1 * q2 < (static_cast<i128>(1) << 50);

    struct KPlan {
        bool slow = false;
        uint64_t iq1 = 0, iq2 = 0, iq2t = 0;
    };
    std::vector<KPlan> plans;
    for (const PrimeDesc& P : S) {
        KPlan plan;
        if (q1 % P.p == 0 || q2 % P.p == 0) {
            plan.slow = true;
        } else {
            plan.iq1 = invmod_u64(q1 % P.p, P.p);
            plan.iq2 = invmod_u64(q2 % P.p, P.p);
            plan.iq2t = plan.iq2 * P.t % P.p;
        }
        plans.push_back(plan);
    }

    for (long long p1 : n1) {
        for (long long p2 : n2) {
            uint64_t key = 0;
            if (ll_ok) {
                for (size_t i = 0; i < S.size(); ++i) {
                    const PrimeDesc& P = S[i];
                    uint64_t coord;
                    if (plans[i].slow) {
                        coord = ext_index_ll(P, p1, q1, p2, q2);
                    } else {
                        uint64_t m1 = static_cast<uint64_t>(((p1 % P.p) + P.p) % P.p);
                        uint64_t m2 = static_cast<uint64_t>(((p2 % P.p) + P.p) % P.p);
                        if (P.f == 2) {
                            uint64_t u0 = m1 * plans[i].iq1 % P.p;
                            uint64_t u1 = m2 * plans[i].iq2 % P.p;
                            coord = u0 + u1 * static_cast<uint64_t>(P.p);
                        } else {
                            coord = (m1 * plans[i].iq1 + m2 * plans[i].iq2t) % P.p;
                        }
                    }
                    key += coord * ctx.sieve().stride(i);
                }
            } else {
                QuadRational c(field, Rational(p1, q1), Rational(p2, q2));
                key = ctx.sieve().key_of(stype_of(c, S));
            }
            if (!ctx.sieve().is_bad_key(key)) {
                out.counts[static_cast<int>(VerdictKind::TypeGood)]++;
                continue;
            }
            QuadRational c(field, Rational(p1, q1), Rational(p2, q2));
            absorb_record(out, verify_c(c, ctx));
        }
    }
}

// ---------------------------------------------------------------------------
// Checkpoint and report serialization
// ---------------------------------------------------------------------------

json record_to_json(const CaseRecord& r) {
    json j;
    j["c"] = r.c;
    j["field"] = r.field;
    j["verdict"] = verdict_name(r.verdict);
    j["primes_used"] = r.primes_used;
    j["residual_periods"] = r.residual_periods;
    j["certified_periods"] = r.certified_periods;
    if (!r.cycles.empty()) {
        json cyc = json::array();
        for (const auto& c : r.cycles) cyc.push_back({{"period", c.period}, {"points", c.points}});
        j["certified_cycles"] = cyc;
    }
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    return j;
}

CaseRecord record_from_json(const json& j) {
    CaseRecord r;
    r.c = j.at("c").get<std::string>();
    r.field = j.at("field").get<long long>();
    r.verdict = verdict_from_name(j.at("verdict").get<std::string>());
    r.primes_used = j.at("primes_used").get<uint32_t>();
    r.residual_periods = j.at("residual_periods").get<std::vector<uint64_t>>();
    r.certified_periods = j.at("certified_periods").get<std::vector<uint64_t>>();
    if (j.contains("certified_cycles")) {
        for (const auto& cj : j.at("certified_cycles")) {
            CycleRecord c;
            c.period = cj.at("period").get<uint64_t>();
            c.points = cj.at("points").get<std::vector<std::string>>();
            r.cycles.push_back(std::move(c));
        }
    }
    if (j.contains("diagnostic")) r.diagnostic = j.at("diagnostic").get<std::string>();
    return r;
}

std::string hash_hex(uint64_t h) {
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json block_to_json(uint64_t block_id, uint64_t cfg_hash, const BlockResult& b) {
    json j;
    j["block"] = block_id;
    j["config"] = hash_hex(cfg_hash);
    j["enumerated"] = b.enumerated;
    j["counts"] = b.counts;
    j["max_primes"] = b.max_primes_used;
    json recs = json::array();
    for (const auto& r : b.records) recs.push_back(record_to_json(r));
    j["records"] = recs;
    return j;
}

BlockResult block_from_json(const json& j, uint64_t* block_id) {
    BlockResult b;
    *block_id = j.at("block").get<uint64_t>();
    b.enumerated = j.at("enumerated").get<uint64_t>();
    auto counts = j.at("counts").get<std::vector<uint64_t>>();
    if (counts.size() != kVerdictKinds) throw std::runtime_error("bad counts arity");
    std::copy(counts.begin(), counts.end(), b.counts.begin());
    b.max_primes_used = j.at("max_primes").get<uint32_t>();
    for (const auto& rj : j.at("records")) b.records.push_back(record_from_json(rj));
    return b;
}

}  // namespace

void write_report(const RunReport& rep, std::ostream& out) {
    json header;
    header["type"] = "header";
    header["tool"] = "quadper";
    header["field"] = rep.config.D;
    header["height_bound"] = rep.config.B;
    header["max_period"] = rep.config.M;
    header["initial_primes"] = rep.config.initial_primes;
    header["refine_limit"] = rep.config.refine_limit;
    header["manual"] = rep.config.manual;
    header["config"] = hash_hex(rep.config_hash);
    out << header.dump() << '\n';

    for (const auto& r : rep.records) {
        json j = record_to_json(r);
        j["type"] = "case";
        out << j.dump() << '\n';
    }

    json s;
    s["type"] = "summary";
    s["total_candidates"] = rep.total_candidates;
    s["enumerated"] = rep.enumerated;
    s["filtered_no_periodic"] = rep.counts[0];
    s["type_good"] = rep.counts[1];
    s["refined_good"] = rep.counts[2];
    s["confirmed"] = rep.counts[3];
    s["counterexamples"] = rep.counts[4];
    s["flagged"] = rep.counts[5];
    s["oracle_failures"] = rep.counts[6];
    s["max_primes_used"] = rep.max_primes_used;
    s["certified_periods"] = rep.certified_periods;
    s["blocks"] = rep.blocks_total;
    s["exit_code"] = rep.exit_code;
    out << s.dump() << '\n';
}

RunReport run_verification(const SearchConfig& config0) {
    VerifyContext base(config0);
    const SearchConfig& config = base.config();  // defaults resolved

    RunReport rep;
    rep.config = config;
    rep.config_hash = config_hash(config);

    // Deterministic block list: height classes over Q, denominator pairs over K.
    std::vector<std::pair<long long, long long>> k_pairs;
    uint64_t nblocks;
    if (base.field()) {
        k_pairs = admissible_pairs(*base.field(), config.B);
        nblocks = k_pairs.size();
    } else {
        nblocks = static_cast<uint64_t>(config.B);
    }
    rep.blocks_total = nblocks;

    std::vector<std::optional<BlockResult>> results(nblocks);

    // Resume from checkpoint.
    if (!config.checkpoint_path.empty()) {
        std::ifstream in(config.checkpoint_path);
        if (in) {
            std::string line;
            uint64_t offset = 0;
            while (std::getline(in, line)) {
                if (line.empty()) {
                    offset += 1;
                    continue;
                }
                json j;
                try {
                    j = json::parse(line);
                } catch (const json::exception&) {
                    throw std::runtime_error("corrupt checkpoint: refusing to resume (byte offset " +
                                             std::to_string(offset) + ")");
                }
                if (j.at("config").get<std::string>() != hash_hex(rep.config_hash))
                    throw std::runtime_error("checkpoint config mismatch: refusing to resume");
                uint64_t id;
                BlockResult b = block_from_json(j, &id);
                if (id >= nblocks) throw std::runtime_error("corrupt checkpoint: block out of range");
                results[id] = std::move(b);
                offset += line.size() + 1;
            }
        }
    }

    std::vector<uint64_t> todo;
    for (uint64_t i = 0; i < nblocks; ++i)
        if (!results[i]) todo.push_back(i);
    if (config.max_blocks >= 0 && todo.size() > static_cast<uint64_t>(config.max_blocks))
        todo.resize(config.max_blocks);

    std::ofstream ckpt;
    std::mutex ckpt_mu;
    if (!config.checkpoint_path.empty())
        ckpt.open(config.checkpoint_path, std::ios::app);

    std::atomic<size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;

    auto worker = [&]() {
        VerifyContext ctx = base.fork();
        try {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= todo.size()) break;
                uint64_t id = todo[i];
                BlockResult b;
                if (base.field()) {
                    process_k_block(*base.field(), config.B, k_pairs[id].first, k_pairs[id].second,
                                    ctx, b);
                } else {
                    process_q_block(static_cast<long long>(id) + 1, ctx, b);
                }
                if (ckpt.is_open()) {
                    std::scoped_lock lk(ckpt_mu);
                    ckpt << block_to_json(id, rep.config_hash, b).dump() << '\n';
                    ckpt.flush();
                }
                results[id] = std::move(b);
            }
        } catch (...) {
            std::scoped_lock lk(err_mu);
            if (!err) err = std::current_exception();
        }
    };

    if (config.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < config.threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (err) std::rethrow_exception(err);

    // Deterministic merge in block order.
    std::set<uint64_t> certified;
    for (uint64_t i = 0; i < nblocks; ++i) {
        if (!results[i]) continue;
        ++rep.blocks_done;
        const BlockResult& b = *results[i];
        rep.enumerated += b.enumerated;
        for (int k = 0; k < kVerdictKinds; ++k) rep.counts[k] += b.counts[k];
        rep.max_primes_used = std::max(rep.max_primes_used, b.max_primes_used);
        for (const auto& r : b.records) {
            for (uint64_t n : r.certified_periods) certified.insert(n);
            rep.records.push_back(r);
        }
    }
    rep.certified_periods.assign(certified.begin(), certified.end());

    uint64_t T = count_height_le(config.B);
    rep.total_candidates = base.field() ? T * T : T;
    rep.counts[static_cast<int>(VerdictKind::FilteredNoPeriodic)] =
        rep.total_candidates - rep.enumerated;

    rep.complete = rep.blocks_done == rep.blocks_total;
    if (rep.counts[static_cast<int>(VerdictKind::Counterexample)] > 0)
        rep.exit_code = 1;
    else if (!rep.complete || rep.counts[static_cast<int>(VerdictKind::OracleFailure)] > 0 ||
             rep.counts[static_cast<int>(VerdictKind::Flagged)] > 0)
        rep.exit_code = 2;
    else
        rep.exit_code = 0;

    if (rep.complete && !config.report_path.empty()) {
        std::ofstream out(config.report_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write report: " + config.report_path);
        write_report(rep, out);
    }
    return rep;
}

}  // namespace quadper
