#include "quadper/sieve.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace quadper {

namespace {

constexpr uint64_t kBitmapLimit = 1u << 22;  // dense membership up to 4M types

std::vector<uint64_t> compute_strides(std::span<const PrimeDesc> S, uint64_t* total_out) {
    if (S.empty()) throw std::invalid_argument("sieve: empty prime list");
    std::vector<uint64_t> strides(S.size());
    unsigned __int128 acc = 1;
    for (size_t i = 0; i < S.size(); ++i) {
        strides[i] = static_cast<uint64_t>(acc);
        acc *= (S[i].q + 1);
        if (acc > static_cast<unsigned __int128>(UINT64_MAX))
            throw std::overflow_error("sieve: type space exceeds 64 bits");
    }
    if (total_out) *total_out = static_cast<uint64_t>(acc);
    return strides;
}

}  // namespace

std::vector<PosPerSet> build_prime_table(const PrimeDesc& P) {
    std::vector<PosPerSet> table;
    table.reserve(P.q + 1);
    for (uint64_t idx = 0; idx < P.q; ++idx)
        table.push_back(possible_periods(P, proj_affine(elem_from_index(P, idx))));
    table.push_back(PosPerSet::all());
    return table;
}

SieveTable::SieveTable(std::vector<PrimeDesc> S, uint32_t M) : S_(std::move(S)), M_(M) {
    strides_ = compute_strides(S_, &total_);
    D_ = S_[0].D;
    for (const PrimeDesc& P : S_)
        if (P.D != D_) throw std::invalid_argument("sieve: primes from mixed fields");
    tables_.reserve(S_.size());
    for (const PrimeDesc& P : S_) tables_.push_back(build_prime_table(P));
}

void SieveTable::finalize_bad(std::vector<uint64_t> keys) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    bad_keys_ = std::move(keys);
    use_bitmap_ = total_ <= kBitmapLimit;
    if (use_bitmap_) {
        bitmap_.assign(total_, 0);
        for (uint64_t k : bad_keys_) bitmap_[k] = 1;
    }
}

bool SieveTable::is_bad_key(uint64_t key) const {
    if (use_bitmap_) return bitmap_[key] != 0;
    return std::binary_search(bad_keys_.begin(), bad_keys_.end(), key);
}

bool SieveTable::is_bad(const SType& T) const { return is_bad_key(key_of(T)); }

PosPerSet SieveTable::type_posper(const SType& T) const {
    if (T.coords.size() != S_.size()) throw std::invalid_argument("type arity mismatch");
    PosPerSet acc = PosPerSet::all();
    for (size_t i = 0; i < S_.size(); ++i) acc = intersect(acc, tables_[i][T.coords[i]]);
    return acc;
}

uint64_t SieveTable::key_of(const SType& T) const {
    if (T.coords.size() != S_.size()) throw std::invalid_argument("type arity mismatch");
    uint64_t key = 0;
    for (size_t i = 0; i < S_.size(); ++i) key += T.coords[i] * strides_[i];
    return key;
}

SType SieveTable::type_from_key(uint64_t key) const {
    SType T;
    T.coords.resize(S_.size());
    for (size_t i = 0; i < S_.size(); ++i) {
        uint64_t radix = S_[i].q + 1;
        T.coords[i] = key % radix;
        key /= radix;
    }
    return T;
}

SieveTable build_sieve(std::vector<PrimeDesc> S, uint32_t M) {
    SieveTable t(std::move(S), M);

    // Partial types paired with their running intersection; a partial whose
    // intersection already sits inside {1..M} is good under every extension.
    std::vector<std::pair<uint64_t, PosPerSet>> frontier;
    frontier.emplace_back(0, PosPerSet::all());
    for (size_t i = 0; i < t.primes().size(); ++i) {
        const auto& table = t.prime_table(i);
        const uint64_t stride = t.strides_[i];
        std::vector<std::pair<uint64_t, PosPerSet>> next;
        for (const auto& [key, run] : frontier) {
            for (uint64_t v = 0; v < table.size(); ++v) {
                PosPerSet run2 = intersect(run, table[v]);
                if (run2.within_bound(M)) continue;
                next.emplace_back(key + v * stride, run2);
            }
        }
        frontier.swap(next);
        t.level_bad_.push_back(frontier.size());
    }

    std::vector<uint64_t> keys;
    keys.reserve(frontier.size());
    for (const auto& [key, run] : frontier) keys.push_back(key);
    t.finalize_bad(std::move(keys));
    return t;
}

SType stype_of(const Rational& c, std::span<const PrimeDesc> S) {
    SType T;
    T.coords.reserve(S.size());
    for (const PrimeDesc& P : S) T.coords.push_back(ext_index(P, reduce_c(c, P)));
    return T;
}

SType stype_of(const QuadRational& c, std::span<const PrimeDesc> S) {
    SType T;
    T.coords.reserve(S.size());
    for (const PrimeDesc& P : S) T.coords.push_back(ext_index(P, reduce_c(c, P)));
    return T;
}

uint64_t type_key(std::span<const PrimeDesc> S, const SType& T) {
    if (T.coords.size() != S.size()) throw std::invalid_argument("type arity mismatch");
    std::vector<uint64_t> strides = compute_strides(S, nullptr);
    uint64_t key = 0;
    for (size_t i = 0; i < S.size(); ++i) key += T.coords[i] * strides[i];
    return key;
}

std::vector<PrimeDesc> sieve_primes(const std::optional<QuadField>& field, int N) {
    std::vector<PrimeDesc> out;
    uint32_t p = 2;
    for (int taken = 0; taken < N; ++p) {
        bool prime = p >= 2;
        for (uint32_t d = 2; d * d <= p; ++d)
            if (p % d == 0) { prime = false; break; }
        if (!prime) continue;
        if (field) {
            for (PrimeDesc P : primes_above(*field, p)) out.push_back(P);
        } else {
            out.push_back(rational_prime(p));
        }
        ++taken;
    }
    return out;
}

std::vector<SieveStatsRow> sieve_stats(const std::optional<QuadField>& field, uint32_t M,
                                       int N_max) {
    std::vector<PrimeDesc> S = sieve_primes(field, N_max);
    SieveTable t = build_sieve(S, M);

    // Map per-prime frontier levels back to rational-prime counts (a split
    // prime contributes two coordinates but belongs to one table row).
    std::vector<SieveStatsRow> rows;
    size_t coord = 0;
    unsigned __int128 total = 1;
    uint32_t last_p = 0;
    int N = 0;
    while (coord < S.size()) {
        uint32_t p = S[coord].p;
        while (coord < S.size() && S[coord].p == p) {
            total *= (S[coord].q + 1);
            ++coord;
        }
        ++N;
        last_p = p;
        (void)last_p;
        SieveStatsRow row;
        row.N = N;
        row.bad_count = t.level_bad_counts()[coord - 1];
        row.total_types = static_cast<uint64_t>(total);
        row.proportion = static_cast<double>(row.bad_count) / static_cast<double>(row.total_types);
        rows.push_back(row);
    }
    return rows;
}

namespace {

constexpr char kMagic[4] = {'Q', 'P', 'S', 'V'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Cursor {
    const unsigned char* p;
    size_t left;
    bool take(void* out, size_t n) {
        if (left < n) return false;
        std::memcpy(out, p, n);
        p += n;
        left -= n;
        return true;
    }
    bool u32(uint32_t* v) {
        unsigned char b[4];
        if (!take(b, 4)) return false;
        *v = b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
        return true;
    }
    bool u64(uint64_t* v) {
        uint32_t lo, hi;
        if (!u32(&lo) || !u32(&hi)) return false;
        *v = lo | (uint64_t(hi) << 32);
        return true;
    }
};

}  // namespace

bool save_sieve_cache(const SieveTable& table, const std::string& path) {
    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u64(buf, static_cast<uint64_t>(table.field_disc()));
    put_u32(buf, table.period_bound());
    put_u32(buf, static_cast<uint32_t>(table.primes().size()));
    for (const PrimeDesc& P : table.primes()) {
        put_u32(buf, P.p);
        put_u32(buf, static_cast<uint32_t>(P.kind) | (uint32_t(P.index) << 8));
        put_u32(buf, P.t);
    }
    put_u64(buf, table.bad_count());
    for (uint64_t k : table.bad_keys()) put_u64(buf, k);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    return static_cast<bool>(out);
}

std::optional<SieveTable> load_sieve_cache(const std::string& path, long long D,
                                           std::span<const PrimeDesc> S, uint32_t M) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Cursor cur{reinterpret_cast<const unsigned char*>(data.data()), data.size()};

    char magic[4];
    if (!cur.take(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) return std::nullopt;
    uint32_t version, m, nprimes;
    uint64_t d_raw;
    if (!cur.u32(&version) || version != kVersion) return std::nullopt;
    if (!cur.u64(&d_raw) || static_cast<long long>(d_raw) != D) return std::nullopt;
    if (!cur.u32(&m) || m != M) return std::nullopt;
    if (!cur.u32(&nprimes) || nprimes != S.size()) return std::nullopt;
    for (const PrimeDesc& P : S) {
        uint32_t p, kind_index, t;
        if (!cur.u32(&p) || !cur.u32(&kind_index) || !cur.u32(&t)) return std::nullopt;
        if (p != P.p || (kind_index & 0xff) != static_cast<uint32_t>(P.kind) ||
            ((kind_index >> 8) & 0xff) != P.index || t != P.t)
            return std::nullopt;
    }
    uint64_t count;
    if (!cur.u64(&count)) return std::nullopt;

    SieveTable t(std::vector<PrimeDesc>(S.begin(), S.end()), M);
    std::vector<uint64_t> keys;
    keys.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        uint64_t k;
        if (!cur.u64(&k) || k >= t.total_types()) return std::nullopt;
        keys.push_back(k);
    }
    if (cur.left != 0) return std::nullopt;
    t.finalize_bad(std::move(keys));
    return t;
}

}  // namespace quadper
