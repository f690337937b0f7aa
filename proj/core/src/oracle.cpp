#include "quadper/oracle.hpp"

#include "quadper/residue.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace quadper {

namespace {

constexpr uint64_t kClosureCap = 1u << 20;

Int abs_int(const Int& v) {
    Int r;
    mpz_abs(r.get_mpz_t(), v.get_mpz_t());
    return r;
}

Int isqrt_int(const Int& v) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
    return r;
}

struct RationalLess {
    bool operator()(const Rational& a, const Rational& b) const { return a < b; }
};
struct QuadLess {
    bool operator()(const QuadRational& a, const QuadRational& b) const {
        if (!(a.x() == b.x())) return a.x() < b.x();
        return a.y() < b.y();
    }
};
template <class E> struct LessFor;
template <> struct LessFor<Rational> { using type = RationalLess; };
template <> struct LessFor<QuadRational> { using type = QuadLess; };

// ---------------------------------------------------------------------------
// Candidate lattices.  A lattice contains every point a periodic point could
// be; an orbit that leaves it can never return to a cycle.
// ---------------------------------------------------------------------------

struct QLattice {
    bool no_periodic = false;
    Int s;       // exact denominator of any periodic point
    Int ubound;  // numerator box, outward-rounded

    bool contains(const Rational& b) const {
        if (b.den() != s) return false;
        return abs_int(b.num()) <= ubound;
    }
};

QLattice make_q_lattice(const Rational& c) {
    QLattice lat;
    const Int q = c.den();
    if (!is_perfect_square(q)) {
        lat.no_periodic = true;  // some valuation of c is odd
        return lat;
    }
    lat.s = isqrt_int(q);
    // |u| <= R*s = (s + sqrt(q + 4|num|))/2, rounded outward.
    lat.ubound = (lat.s + isqrt_int(q + 4 * abs_int(c.num()))) / 2 + 2;
    return lat;
}

struct KLattice {
    bool no_periodic = false;
    QuadField f;
    Int L;  // candidates (u + v*w)/L
    bool real = false;
    double sp = 0, sm = 0;      // real embeddings of w
    double bp = 0, bm = 0;      // |u + v*sigma| bounds, margin included
    double re_w = 0, im_w = 0;  // complex embedding of w (imaginary case)
    double rad = 0;             // |u + v*w| bound (imaginary case)

    bool contains(const QuadRational& b) const {
        if (!mpz_divisible_p(L.get_mpz_t(), b.x().den().get_mpz_t())) return false;
        if (!mpz_divisible_p(L.get_mpz_t(), b.y().den().get_mpz_t())) return false;
        Int u = b.x().num() * (L / b.x().den());
        Int v = b.y().num() * (L / b.y().den());
        double ud = u.get_d(), vd = v.get_d();
        if (real) {
            return std::fabs(ud + vd * sp) <= bp && std::fabs(ud + vd * sm) <= bm;
        }
        double x = ud + vd * re_w, y = vd * im_w;
        return x * x + y * y <= rad * rad;
    }
};

std::vector<uint32_t> small_prime_factors(Int v) {
    std::vector<uint32_t> out;
    v = abs_int(v);
    uint32_t p = 2;
    while (cmp(v, 1) > 0 && p < (1u << 16)) {
        if (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
            out.push_back(p);
            while (mpz_divisible_ui_p(v.get_mpz_t(), p)) v /= p;
        }
        Int pp(static_cast<unsigned long>(p));
        if (cmp(v, 1) > 0 && pp * pp > v) {
            // remaining cofactor is prime
            if (v >= (1 << 16))
                throw OracleError("oracle: denominator prime exceeds the residue cap");
            out.push_back(static_cast<uint32_t>(v.get_ui()));
            return out;
        }
        p = (p == 2) ? 3 : p + 2;
    }
    if (cmp(v, 1) > 0) throw OracleError("oracle: denominator prime exceeds the residue cap");
    return out;
}

double embed_abs(const QuadRational& c, double sigma) {
    return std::fabs(c.x().to_double() + c.y().to_double() * sigma);
}

double escape_radius(double abs_c) { return (1.0 + std::sqrt(1.0 + 4.0 * abs_c)) / 2.0; }

KLattice make_k_lattice(const QuadRational& c) {
    KLattice lat;
    lat.f = c.field();
    lat.real = lat.f.D > 0;

    // Denominator ideal: v(periodic) = v(c)/2 wherever v(c) < 0, so every
    // negative valuation of c must be even, and L clears half of each.
    lat.L = 1;
    Int E = lcm(c.x().den(), c.y().den());
    for (uint32_t p : small_prime_factors(E)) {
        long long need = 0;
        for (const PrimeDesc& P : primes_above(lat.f, p)) {
            long long v = valuation(c, P);
            if (v >= 0) continue;
            if (v % 2 != 0) {
                lat.no_periodic = true;
                return lat;
            }
            long long half = -v / 2;
            long long vp = (half + P.e - 1) / P.e;  // ceil(half / e)
            need = std::max(need, vp);
        }
        Int pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(need));
        lat.L *= pk;
    }

    double Ld = lat.L.get_d();
    if (lat.real) {
        double sqD = std::sqrt(static_cast<double>(lat.f.D));
        lat.sp = (lat.f.a + sqD) / 2.0;
        lat.sm = (lat.f.a - sqD) / 2.0;
        lat.bp = Ld * escape_radius(embed_abs(c, lat.sp)) + 1.5;
        lat.bm = Ld * escape_radius(embed_abs(c, lat.sm)) + 1.5;
    } else {
        lat.re_w = lat.f.a / 2.0;
        lat.im_w = std::sqrt(static_cast<double>(-lat.f.D)) / 2.0;
        double abs_c = std::sqrt(std::max(0.0, c.norm().to_double()));
        lat.rad = Ld * escape_radius(abs_c) + 1.5;
    }
    return lat;
}

// ---------------------------------------------------------------------------
// Orbit classification by exact iteration.  Terminates: an orbit inside the
// lattice box ranges over finitely many points, and once outside it can never
// be periodic.
// ---------------------------------------------------------------------------

template <class E, class Lat>
std::optional<uint64_t> classify_orbit(const E& c, const E& alpha, const Lat& lat) {
    if (!lat.contains(alpha)) return std::nullopt;
    std::map<E, uint64_t, typename LessFor<E>::type> seen;
    seen.emplace(alpha, 0);
    E cur = alpha;
    uint64_t steps = 0;
    while (true) {
        cur = cur * cur + c;
        ++steps;
        if (cur == alpha) return steps;
        if (!lat.contains(cur)) return std::nullopt;
        if (!seen.emplace(cur, steps).second) return std::nullopt;  // cycle avoiding alpha
        if (steps > kOracleCandidateCap + 2)
            throw OracleError("oracle: orbit exceeded the lattice size bound");
    }
}

template <class E>
void sort_certificate(OrbitCertificate<E>& cert) {
    typename LessFor<E>::type less;
    std::sort(cert.periodic.begin(), cert.periodic.end(),
              [&](const auto& a, const auto& b) { return less(a.first, b.first); });
    std::sort(cert.preperiodic.begin(), cert.preperiodic.end(),
              [&](const auto& a, const auto& b) { return less(a.first, b.first); });
}

}  // namespace

double northcott_bound(const Rational& c) {
    return escape_radius(std::fabs(c.to_double()));
}

double northcott_bound(const QuadRational& c) {
    const QuadField& f = c.field();
    if (f.D > 0) {
        double sqD = std::sqrt(static_cast<double>(f.D));
        double a1 = embed_abs(c, (f.a + sqD) / 2.0);
        double a2 = embed_abs(c, (f.a - sqD) / 2.0);
        return escape_radius(std::max(a1, a2));
    }
    return escape_radius(std::sqrt(std::max(0.0, c.norm().to_double())));
}

OrbitCertificate<Rational> find_periodic_points(const Rational& c, uint32_t max_period) {
    (void)max_period;  // detection is exact regardless; see header
    OrbitCertificate<Rational> cert;
    cert.c = c;
    QLattice lat = make_q_lattice(c);
    if (lat.no_periodic) return cert;

    if (2 * lat.ubound + 1 > static_cast<long>(kOracleCandidateCap))
        throw OracleError("oracle: candidate set exceeds cap");
    long long ub = lat.ubound.get_si();

    for (long long u = -ub; u <= ub; ++u) {
        Int un(static_cast<long>(u));
        if (cmp(lat.s, 1) > 0) {
            Int g;
            mpz_gcd(g.get_mpz_t(), un.get_mpz_t(), lat.s.get_mpz_t());
            if (cmp(g, 1) != 0) continue;
        }
        Rational alpha(un, lat.s);
        if (auto n = classify_orbit(c, alpha, lat)) cert.periodic.emplace_back(alpha, *n);
    }
    sort_certificate(cert);
    return cert;
}

namespace {

// Integer ranges of the K candidate box; outward-rounded, the exact
// iteration filters the extras.
struct KBox {
    long long vmin = 0, vmax = 0;

    std::pair<long long, long long> u_range(const KLattice& lat, long long v) const {
        double vd = static_cast<double>(v);
        if (lat.real) {
            double lo = std::max(-lat.bp - vd * lat.sp, -lat.bm - vd * lat.sm);
            double hi = std::min(lat.bp - vd * lat.sp, lat.bm - vd * lat.sm);
            if (hi < lo) return {1, 0};
            return {static_cast<long long>(std::ceil(lo - 0.5)),
                    static_cast<long long>(std::floor(hi + 0.5))};
        }
        double w2 = lat.rad * lat.rad - (vd * lat.im_w) * (vd * lat.im_w);
        if (w2 < 0) return {1, 0};
        double w = std::sqrt(w2);
        double center = -vd * lat.re_w;
        return {static_cast<long long>(std::ceil(center - w - 0.5)),
                static_cast<long long>(std::floor(center + w + 0.5))};
    }
};

KBox make_k_box(const KLattice& lat) {
    KBox box;
    if (lat.real) {
        double sqD = std::sqrt(static_cast<double>(lat.f.D));
        box.vmax = static_cast<long long>(std::floor((lat.bp + lat.bm) / sqD)) + 1;
    } else {
        box.vmax = static_cast<long long>(
                       std::floor(2.0 * lat.rad / std::sqrt(static_cast<double>(-lat.f.D)))) +
                   1;
    }
    box.vmin = -box.vmax;
    return box;
}

}  // namespace

OrbitCertificate<QuadRational> find_periodic_points(const QuadRational& c, uint32_t max_period) {
    (void)max_period;
    OrbitCertificate<QuadRational> cert;
    cert.c = c;
    KLattice lat = make_k_lattice(c);
    if (lat.no_periodic) return cert;
    KBox box = make_k_box(lat);

    unsigned long long count = 0;
    for (long long v = box.vmin; v <= box.vmax; ++v) {
        auto [lo, hi] = box.u_range(lat, v);
        if (hi >= lo) count += static_cast<unsigned long long>(hi - lo + 1);
        if (count > kOracleCandidateCap)
            throw OracleError("oracle: candidate set exceeds cap");
    }

    const QuadField& f = c.field();
    for (long long v = box.vmin; v <= box.vmax; ++v) {
        auto [lo, hi] = box.u_range(lat, v);
        for (long long u = lo; u <= hi; ++u) {
            QuadRational alpha(f, Rational(Int(static_cast<long>(u)), lat.L), Rational(Int(static_cast<long>(v)), lat.L));
            if (auto n = classify_orbit(c, alpha, lat)) cert.periodic.emplace_back(alpha, *n);
        }
    }
    sort_certificate(cert);
    return cert;
}

std::optional<uint64_t> exact_period(const Rational& c, const Rational& alpha) {
    QLattice lat = make_q_lattice(c);
    if (lat.no_periodic) return std::nullopt;
    return classify_orbit(c, alpha, lat);
}

std::optional<uint64_t> exact_period(const QuadRational& c, const QuadRational& alpha) {
    KLattice lat = make_k_lattice(c);
    if (lat.no_periodic) return std::nullopt;
    return classify_orbit(c, alpha, lat);
}

namespace {

template <class E>
void compute_closure(OrbitCertificate<E>& cert) {
    using Less = typename LessFor<E>::type;
    std::set<E, Less> all, periodic_set;
    std::vector<E> work;
    for (const auto& [pt, n] : cert.periodic) {
        all.insert(pt);
        periodic_set.insert(pt);
        work.push_back(pt);
    }
    while (!work.empty()) {
        E y = work.back();
        work.pop_back();
        if (auto r = sqrt_in_field(y - cert.c)) {
            for (const E& z : {*r, -*r}) {
                if (all.insert(z).second) work.push_back(z);
            }
        }
        if (all.size() > kClosureCap) throw OracleError("oracle: preperiodic closure exceeds cap");
    }
    // Tail lengths: forward steps until the periodic set.
    for (const E& pt : all) {
        uint32_t tail = 0;
        E cur = pt;
        while (!periodic_set.count(cur)) {
            cur = cur * cur + cert.c;
            ++tail;
            if (tail > all.size() + 1) throw OracleError("oracle: closure tail did not terminate");
        }
        cert.preperiodic.emplace_back(pt, tail);
    }
    cert.closure_computed = true;
}

}  // namespace

OrbitCertificate<Rational> preperiodic_closure(const Rational& c) {
    OrbitCertificate<Rational> cert = find_periodic_points(c, 1);
    compute_closure(cert);
    sort_certificate(cert);
    return cert;
}

OrbitCertificate<QuadRational> preperiodic_closure(const QuadRational& c) {
    OrbitCertificate<QuadRational> cert = find_periodic_points(c, 1);
    compute_closure(cert);
    sort_certificate(cert);
    return cert;
}

namespace {

template <class E>
std::vector<std::vector<E>> group_cycles_impl(const OrbitCertificate<E>& cert) {
    using Less = typename LessFor<E>::type;
    std::set<E, Less> remaining;
    for (const auto& [pt, n] : cert.periodic) remaining.insert(pt);
    std::vector<std::vector<E>> cycles;
    while (!remaining.empty()) {
        E start = *remaining.begin();
        std::vector<E> cycle;
        E cur = start;
        do {
            cycle.push_back(cur);
            remaining.erase(cur);
            cur = cur * cur + cert.c;
        } while (!(cur == start));
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

}  // namespace

std::vector<std::vector<Rational>> group_cycles(const OrbitCertificate<Rational>& cert) {
    return group_cycles_impl(cert);
}
std::vector<std::vector<QuadRational>> group_cycles(const OrbitCertificate<QuadRational>& cert) {
    return group_cycles_impl(cert);
}

}  // namespace quadper
