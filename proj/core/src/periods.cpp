#include "quadper/periods.hpp"

#include <algorithm>
#include <stdexcept>

namespace quadper {

PosPerSet PosPerSet::finite(std::vector<uint64_t> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    PosPerSet s;
    s.elems_ = std::move(elems);
    return s;
}

bool PosPerSet::contains(uint64_t n) const {
    if (all_) return true;
    return std::binary_search(elems_.begin(), elems_.end(), n);
}

bool PosPerSet::within_bound(uint64_t bound) const {
    if (all_) return false;
    return elems_.empty() || elems_.back() <= bound;
}

PosPerSet intersect(const PosPerSet& a, const PosPerSet& b) {
    if (a.all_) return b;
    if (b.all_) return a;
    PosPerSet out;
    std::set_intersection(a.elems_.begin(), a.elems_.end(), b.elems_.begin(), b.elems_.end(),
                          std::back_inserter(out.elems_));
    return out;
}

PosPerSet posper_intersect(std::span<const PosPerSet> sets) {
    if (sets.empty()) throw std::invalid_argument("posper_intersect: empty list");
    PosPerSet acc = sets[0];
    for (size_t i = 1; i < sets.size(); ++i) acc = intersect(acc, sets[i]);
    return acc;
}

std::vector<CycleInfo> cycle_decomposition(const PrimeDesc& P, ResidueElem c_tilde) {
    const uint64_t q = P.q;
    std::vector<uint32_t> succ(q);
    for (uint64_t i = 0; i < q; ++i) {
        ResidueElem z = elem_from_index(P, i);
        ResidueElem img = res_add(P, res_mul(P, z, z), c_tilde);
        succ[i] = static_cast<uint32_t>(elem_index(P, img));
    }

    std::vector<CycleInfo> cycles;
    std::vector<uint8_t> state(q, 0);  // 0 new, 1 on current path, 2 done
    std::vector<uint32_t> pos(q, 0);
    std::vector<uint32_t> path;
    for (uint64_t start = 0; start < q; ++start) {
        if (state[start]) continue;
        path.clear();
        uint32_t cur = static_cast<uint32_t>(start);
        while (state[cur] == 0) {
            state[cur] = 1;
            pos[cur] = static_cast<uint32_t>(path.size());
            path.push_back(cur);
            cur = succ[cur];
        }
        if (state[cur] == 1) {
            CycleInfo info;
            for (size_t i = pos[cur]; i < path.size(); ++i)
                info.points.push_back(elem_from_index(P, path[i]));
            info.m = info.points.size();
            info.lambda = multiplier(P, info.points);
            info.r = mult_order(P, info.lambda);
            cycles.push_back(std::move(info));
        }
        for (uint32_t node : path) state[node] = 2;
    }
    return cycles;
}

ResidueElem multiplier(const PrimeDesc& P, std::span<const ResidueElem> cycle) {
    if (cycle.empty()) throw std::invalid_argument("multiplier: empty cycle");
    ResidueElem two = res_scalar(P, 2);
    ResidueElem lambda = res_one();
    for (const ResidueElem& z : cycle) lambda = res_mul(P, lambda, res_mul(P, two, z));
    return lambda;
}

namespace {

std::vector<uint64_t> prime_factors(uint64_t n) {
    std::vector<uint64_t> fs;
    for (uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            fs.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

}  // namespace

std::optional<uint64_t> mult_order(const PrimeDesc& P, ResidueElem lambda) {
    if (res_is_zero(lambda)) return std::nullopt;
    uint64_t order = P.q - 1;
    for (uint64_t f : prime_factors(order)) {
        while (order % f == 0 && res_pow(P, lambda, order / f) == res_one()) order /= f;
    }
    return order;
}

PosPerSet possible_periods(const PrimeDesc& P, const ProjPoint& c_proj) {
    if (c_proj.infinity) return PosPerSet::all();
    std::vector<uint64_t> candidates;
    for (const CycleInfo& cyc : cycle_decomposition(P, c_proj.value)) {
        candidates.push_back(cyc.m);
        if (!cyc.r) continue;  // superattracting: only m survives
        uint64_t mr = cyc.m * *cyc.r;
        candidates.push_back(mr);
        // m*r*p^e for e >= 1 while p^(e-1) * (p-1) <= 2 * e(P)
        uint64_t pe_prev = 1, pe = P.p;
        while (pe_prev * (P.p - 1) <= 2 * static_cast<uint64_t>(P.e)) {
            candidates.push_back(mr * pe);
            pe_prev *= P.p;
            pe *= P.p;
        }
    }
    return PosPerSet::finite(std::move(candidates));
}

}  // namespace quadper
