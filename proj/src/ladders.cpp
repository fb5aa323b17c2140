#include "isovolc/ladders.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "isovolc/errors.hpp"

namespace isovolc {

namespace {

// memo caches for the expensive enumerations; keyed by canonical lattice
// forms, idempotent entries
std::mutex g_cache_mutex;
std::map<std::string, std::vector<OrderPtr>> g_l_overorder_cache;
std::map<std::string, std::shared_ptr<MultiplicatorLadder>> g_ladder_cache;
std::map<std::string, bool> g_bass_cache;

std::string pair_key(const ZLattice& a, const ZLattice& b) {
    return a.key() + "/" + b.key();
}

// coset representatives of O/S as elements of O (S <= O, finite index)
std::vector<AlgebraElement> coset_reps(const OrderPtr& O, const ZLattice& S,
                                       unsigned long limit) {
    size_t n = O->degree();
    // C = matrix of S in O coordinates
    Rat idx = lat_index(O->lattice(), S);
    if (idx.get_den() != 1) throw err("ladders", "NotContained", "coset_reps: S not in O");
    if (idx.get_num() > Int(limit))
        throw err("ladders", "QuotientTooLarge",
                  "quotient size " + idx.get_num().get_str() + " exceeds limit");
    MatZ C(n, n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Int> t(n);
        for (size_t j = 0; j < n; ++j) t[j] = S.basis().at(i, j) * O->lattice().denominator();
        for (size_t k = 0; k < n; ++k) {
            Int den = O->lattice().basis().at(k, k) * S.denominator();
            Int c = divexact(t[k], den);
            C.at(i, k) = c;
            for (size_t j = k; j < n; ++j)
                t[j] -= c * O->lattice().basis().at(k, j) * S.denominator();
        }
    }
    MatZ U, V;
    std::vector<Int> d = snf_with_transform(C, U, V);
    MatZ Vinv = inverse_unimodular(V);
    // reps: y with 0 <= y_i < d_i mapped back by x = y * V^{-1}
    std::vector<AlgebraElement> reps;
    std::vector<Int> y(n);
    for (;;) {
        std::vector<Int> x = row_times_mat(y, Vinv);
        std::vector<Int> coords = row_times_mat(x, O->lattice().basis());
        reps.push_back(elem_from_coords(O->algebra(), coords, O->lattice().denominator()));
        // odometer over the diagonal
        size_t k = 0;
        for (; k < n; ++k) {
            y[k] += 1;
            if (y[k] < d[k]) break;
            y[k] = 0;
        }
        if (k == n) break;
    }
    return reps;
}

OrderPtr saturate_with(const OrderPtr& S, const AlgebraElement& x) {
    ZLattice L = lat_add_element(S->lattice(), x);
    for (;;) {
        ZLattice next = lat_sum(L, lat_product(L, L));
        if (next == L) break;
        L = next;
    }
    return make_order(L);
}

struct OrderLess {
    bool operator()(const OrderPtr& a, const OrderPtr& b) const {
        return a->compare(*b) < 0;
    }
};

}  // namespace

std::vector<OrderPtr> enumerate_orders_between(const OrderPtr& R, const OrderPtr& O,
                                               unsigned long limit) {
    if (!O->lattice().contains_lattice(R->lattice()))
        throw err("ladders", "NotContained", "R not contained in O");
    std::set<OrderPtr, OrderLess> seen{R};
    std::vector<OrderPtr> queue{R};
    while (!queue.empty()) {
        OrderPtr S = queue.back();
        queue.pop_back();
        if (S->lattice() == O->lattice()) continue;
        for (const auto& x : coset_reps(O, S->lattice(), limit)) {
            if (S->lattice().contains(x)) continue;
            OrderPtr grown = saturate_with(S, x);
            if (!O->lattice().contains_lattice(grown->lattice())) continue;
            if (seen.insert(grown).second) queue.push_back(grown);
        }
    }
    std::vector<OrderPtr> out(seen.begin(), seen.end());
    return out;
}

namespace {

// (R:S) is R or l-primary: contained in l and in no other maximal ideal of R
// above the same rational prime
bool is_l_overorder(const OrderPtr& R, const MaximalIdeal& l, const OrderPtr& S,
                    const std::vector<MaximalIdeal>& primes_above_ell) {
    if (S->lattice() == R->lattice()) return true;
    ZLattice c = colon(R->lattice(), S->lattice());
    if (!l.lat.contains_lattice(c)) return false;
    for (const auto& m : primes_above_ell) {
        if (m.lat == l.lat) continue;
        if (m.lat.contains_lattice(c)) return false;
    }
    return true;
}

}  // namespace

std::vector<OrderPtr> enumerate_l_overorders(const OrderPtr& R, const MaximalIdeal& l,
                                             unsigned long limit) {
    std::string key = pair_key(R->lattice(), l.lat);
    {
        std::lock_guard<std::mutex> lk(g_cache_mutex);
        auto it = g_l_overorder_cache.find(key);
        if (it != g_l_overorder_cache.end()) return it->second;
    }
    OrderPtr O = l_maximal_overorder(R, l.ell);
    auto all = enumerate_orders_between(R, O, limit);
    auto primes = maximal_ideals_above(R, l.ell);
    std::vector<OrderPtr> out;
    for (const auto& S : all)
        if (is_l_overorder(R, l, S, primes)) out.push_back(S);
    {
        std::lock_guard<std::mutex> lk(g_cache_mutex);
        g_l_overorder_cache[key] = out;
    }
    return out;
}

bool is_bass_at(const OrderPtr& R, const MaximalIdeal& l) {
    std::string key = pair_key(R->lattice(), l.lat);
    {
        std::lock_guard<std::mutex> lk(g_cache_mutex);
        auto it = g_bass_cache.find(key);
        if (it != g_bass_cache.end()) return it->second;
    }
    bool ok = true;
    for (const auto& S : enumerate_l_overorders(R, l)) {
        for (const auto& L : ideals_above_in(S, l))
            if (cm_type(S, L) != 1) ok = false;
    }
    {
        std::lock_guard<std::mutex> lk(g_cache_mutex);
        g_bass_cache[key] = ok;
    }
    return ok;
}

bool is_bass_at_global(const OrderPtr& R, const MaximalIdeal& l, const OrderPtr& OK) {
    for (const auto& S : enumerate_overorders(R, OK)) {
        for (const auto& L : ideals_above_in(S, l))
            if (cm_type(S, L) != 1) return false;
    }
    return true;
}

std::pair<OrderPtr, bool> minimal_l_overorder(const OrderPtr& R, const MaximalIdeal& l) {
    if (!l.singular) throw err("ladders", "NotSingular", "l is regular");
    OrderPtr T = multiplicator_ring(l.lat);
    if (cm_type(R, l) == 1) return {T, true};  // Gorenstein at l certifies uniqueness
    // enumerate minimal l-overorders and check they all coincide with T
    auto oos = enumerate_l_overorders(R, l);
    std::vector<OrderPtr> proper;
    for (const auto& S : oos)
        if (S->lattice() != R->lattice()) proper.push_back(S);
    std::vector<OrderPtr> minimal;
    for (const auto& S : proper) {
        bool is_min = true;
        for (const auto& S2 : proper) {
            if (S2->lattice() == S->lattice()) continue;
            if (S->lattice().contains_lattice(S2->lattice())) {
                is_min = false;
                break;
            }
        }
        if (is_min) minimal.push_back(S);
    }
    bool unique = minimal.size() == 1 && minimal[0]->lattice() == T->lattice();
    return {T, unique};
}

SplittingType classify_splitting(const OrderPtr& R, const MaximalIdeal& l) {
    auto [T, unique] = minimal_l_overorder(R, l);
    if (!unique)
        throw err("ladders", "NotMinimal", "(l:l) is not the unique minimal l-overorder");
    auto above = ideals_above_in(T, l);
    SplittingType st;
    if (above.size() == 2) {
        st.kind = SplittingType::Kind::Split;
        st.certificate = above;
        return st;
    }
    if (above.size() != 1)
        throw err("ladders", "Internal", "minimal overorder with bad fiber");
    const MaximalIdeal& L = above[0];
    if (L.lat == l.lat) {
        st.kind = SplittingType::Kind::Inert;
        // residue degree of T/l over R/l
        Int rs = l.residue_size;
        Int ts = L.residue_size;
        unsigned f = 0;
        Int v = ts;
        while (v > 1) {
            v = divexact(v, rs);
            ++f;
        }
        st.inert_degree = f;
        st.certificate = {L};
        return st;
    }
    ZLattice L2 = lat_product(L.lat, L.lat);
    if (L2 == l.lat) {
        st.kind = SplittingType::Kind::Ramified;
    } else {
        if (!l.lat.contains_lattice(L2))
            throw err("ladders", "Internal", "L^2 not inside l");
        st.kind = SplittingType::Kind::Singular;
    }
    st.certificate = {L};
    return st;
}

namespace {

MultiplicatorLadder build_ladder_uncached(const OrderPtr& R, const MaximalIdeal& l,
                                          const OrderPtr& OK) {
    MultiplicatorLadder lad;
    lad.base = R;
    lad.base_prime = l;
    lad.maximal_order = OK;

    std::vector<OrderPtr> rungs_up;  // R first, then upward
    rungs_up.push_back(R);

    OrderPtr cur = R;
    while (true) {
        auto above = ideals_above_in(cur, l);
        bool any_singular = false;
        for (const auto& m : above) any_singular |= m.singular;
        if (!any_singular) break;  // reached the l-maximal top
        if (above.size() != 1)
            throw NotALadder("multiple-singular-primes",
                             static_cast<unsigned>(rungs_up.size() - 1),
                             "rung has several maximal ideals above l with one singular");
        const MaximalIdeal& L = above[0];
        auto [T, unique] = minimal_l_overorder(cur, L);
        if (!unique)
            throw NotALadder("multiplicator-ring jump",
                             static_cast<unsigned>(rungs_up.size() - 1),
                             "(L:L) skips an intermediate order at rung " +
                                 std::to_string(rungs_up.size() - 1));
        rungs_up.push_back(T);
        cur = T;
    }

    unsigned d = static_cast<unsigned>(rungs_up.size() - 1);
    // verify these are ALL the l-overorders
    auto oos = enumerate_l_overorders(R, l);
    if (oos.size() != rungs_up.size())
        throw NotALadder("extra-l-overorders", d,
                         "found " + std::to_string(oos.size()) + " l-overorders for " +
                             std::to_string(rungs_up.size()) + " rungs");
    for (const auto& S : oos) {
        bool found = false;
        for (const auto& T : rungs_up) found |= (T->lattice() == S->lattice());
        if (!found)
            throw NotALadder("extra-l-overorders", d, "an l-overorder is not a rung");
    }

    // levels[i] = R_i: levels[d] = R, levels[0] = top
    lad.levels.assign(rungs_up.rbegin(), rungs_up.rend());
    lad.level_prime.assign(lad.levels.size(), std::nullopt);
    for (unsigned i = 1; i <= d; ++i) {
        // unique singular maximal ideal of R_i above l
        auto above = ideals_above_in(lad.levels[i], l);
        if (above.size() != 1 || !above[0].singular)
            throw NotALadder("multiple-singular-primes", i, "rung prime not unique");
        lad.level_prime[i] = above[0];
    }
    lad.conductors.clear();
    for (unsigned i = 0; i <= d; ++i)
        lad.conductors.push_back(conductor(lad.levels[i], OK).lat);
    if (d >= 1) lad.top_splitting = classify_splitting(lad.levels[1], *lad.level_prime[1]);
    return lad;
}

}  // namespace

MultiplicatorLadder build_ladder(const OrderPtr& R, const MaximalIdeal& l,
                                 const OrderPtr& OK) {
    std::string key = pair_key(R->lattice(), l.lat) + "/" + OK->lattice().key();
    {
        std::lock_guard<std::mutex> lk(g_cache_mutex);
        auto it = g_ladder_cache.find(key);
        if (it != g_ladder_cache.end()) return *it->second;
    }
    MultiplicatorLadder lad = build_ladder_uncached(R, l, OK);
    {
        std::lock_guard<std::mutex> lk(g_cache_mutex);
        g_ladder_cache[key] = std::make_shared<MultiplicatorLadder>(lad);
    }
    return lad;
}

unsigned ladder_length_from_conductor(const MultiplicatorLadder& ladder) {
    const OrderPtr& OK = ladder.maximal_order;
    // maximal-order primes above l
    std::vector<MaximalIdeal> above;
    for (const auto& P : maximal_ideals_above(OK, ladder.base_prime.ell))
        if (lat_intersect(P.lat, ladder.base->lattice()) == ladder.base_prime.lat)
            above.push_back(P);
    auto val_at = [&](const ZLattice& f, const MaximalIdeal& P) {
        unsigned v = 0;
        ZLattice pw = OK->lattice();
        for (;;) {
            pw = lat_product(pw, P.lat);
            if (!pw.contains_lattice(f)) return v;
            ++v;
        }
    };
    const ZLattice& f = ladder.conductors[ladder.d()];
    unsigned d = ladder.d();
    if (d == 0) {
        for (const auto& P : above)
            if (val_at(f, P) != 0)
                throw err("ladders", "ValuationMismatch", "regular prime with conductor");
        return 0;
    }
    const SplittingType& st = *ladder.top_splitting;
    unsigned computed = 0;
    switch (st.kind) {
        case SplittingType::Kind::Ramified: {
            if (above.size() != 1)
                throw err("ladders", "ValuationMismatch", "ramified with split extension");
            unsigned v = val_at(f, above[0]);
            if (v % 2 != 0)
                throw err("ladders", "ValuationMismatch", "odd ramified valuation");
            computed = v / 2;
            break;
        }
        case SplittingType::Kind::Split: {
            if (above.size() != 2)
                throw err("ladders", "ValuationMismatch", "split with one prime");
            unsigned v1 = val_at(f, above[0]);
            unsigned v2 = val_at(f, above[1]);
            if (v1 != v2)
                throw err("ladders", "ValuationMismatch", "unequal split valuations");
            computed = v1;
            break;
        }
        case SplittingType::Kind::Inert: {
            if (above.size() != 1)
                throw err("ladders", "ValuationMismatch", "inert with several primes");
            computed = val_at(f, above[0]);
            break;
        }
        default:
            throw err("ladders", "ValuationMismatch", "singular top splitting");
    }
    if (computed != d)
        throw err("ladders", "ValuationMismatch",
                  "conductor valuation gives d = " + std::to_string(computed));
    return computed;
}

std::vector<OrderPtr> overorder_components(const OrderPtr& R, const OrderPtr& T,
                                           const std::vector<MaximalIdeal>& sing) {
    std::vector<OrderPtr> comps;
    for (const auto& m : sing) {
        // m-primary part of T/R: { x in T : m^e x <= R }, e grown to stability
        ZLattice pw = m.lat;
        ZLattice part = lat_intersect(T->lattice(), colon(R->lattice(), pw));
        for (;;) {
            pw = lat_product(pw, m.lat);
            ZLattice next = lat_intersect(T->lattice(), colon(R->lattice(), pw));
            if (next == part) break;
            part = next;
        }
        comps.push_back(make_order(lat_sum(R->lattice(), part)));
    }
    // verify the decomposition
    ZLattice sum = R->lattice();
    for (const auto& c : comps) sum = lat_sum(sum, c->lattice());
    if (sum != T->lattice())
        throw err("ladders", "DecompositionFailure",
                  "overorder does not split into primary components");
    return comps;
}

std::pair<MultiplicatorLadder, unsigned> locate_in_ladder(const OrderPtr& R,
                                                          const MaximalIdeal& l,
                                                          const OrderPtr& T,
                                                          const OrderPtr& OK) {
    if (!T->lattice().contains_lattice(R->lattice()))
        throw err("ladders", "NotContained", "T is not an overorder of R");
    MultiplicatorLadder base_ladder = build_ladder(R, l, OK);
    auto sing = singular_primes(R, OK);
    // order the singular primes with l first
    std::stable_sort(sing.begin(), sing.end(), [&](const MaximalIdeal& a, const MaximalIdeal& b) {
        bool al = a.lat == l.lat, bl = b.lat == l.lat;
        return al > bl;
    });
    if (sing.empty() || sing[0].lat != l.lat)
        throw err("ladders", "NotSingular", "l is not a singular prime of R");
    auto comps = overorder_components(R, T, sing);
    // S_1 must be a rung
    unsigned level = base_ladder.d() + 1;
    for (unsigned i = 0; i <= base_ladder.d(); ++i)
        if (base_ladder.rung(i)->lattice() == comps[0]->lattice()) level = i;
    if (level > base_ladder.d())
        throw err("ladders", "Internal", "l-component of T is not a rung");
    // translate the whole ladder by the other components
    ZLattice rest = R->lattice();
    for (size_t k = 1; k < comps.size(); ++k) rest = lat_sum(rest, comps[k]->lattice());
    OrderPtr O = make_order(lat_sum(base_ladder.rung(base_ladder.d())->lattice(), rest));
    // the singular prime of O over l
    auto above = ideals_above_in(O, l);
    if (above.size() != 1)
        throw err("ladders", "Internal", "translated base has no unique prime over l");
    MultiplicatorLadder lad = build_ladder(O, above[0], OK);
    if (lad.rung(level)->lattice() != T->lattice())
        throw err("ladders", "Internal", "located ladder misses T");
    return {lad, level};
}

std::vector<OrderPtr> enumerate_overorders_brute(const OrderPtr& R, const OrderPtr& OK,
                                                 unsigned long limit) {
    return enumerate_orders_between(R, OK, limit);
}

std::vector<OrderPtr> enumerate_overorders(const OrderPtr& R, const OrderPtr& OK,
                                           unsigned long limit) {
    auto sing = singular_primes(R, OK);
    if (sing.empty()) return {OK};
    // fast path requires a ladder at every singular prime
    std::vector<MultiplicatorLadder> ladders;
    bool fast = true;
    for (const auto& m : sing) {
        try {
            ladders.push_back(build_ladder(R, m, OK));
        } catch (const NotALadder&) {
            fast = false;
            break;
        }
    }
    if (!fast) return enumerate_overorders_brute(R, OK, limit);
    std::set<OrderPtr, OrderLess> out;
    std::vector<unsigned> k(sing.size(), 0);
    for (;;) {
        ZLattice prod = OK->lattice();
        for (size_t i = 0; i < sing.size(); ++i)
            prod = lat_product(prod, lat_pow(sing[i].lat, k[i], OK->lattice()));
        out.insert(make_order(lat_sum(R->lattice(), prod)));
        size_t i = 0;
        for (; i < sing.size(); ++i) {
            k[i] += 1;
            if (k[i] <= ladders[i].d()) break;
            k[i] = 0;
        }
        if (i == sing.size()) break;
    }
    return std::vector<OrderPtr>(out.begin(), out.end());
}

Int count_ladders(const OrderPtr& R, const MaximalIdeal& l, const OrderPtr& OK) {
    // number of l-ladders = product over the other singular primes of the
    // number of their m-overorders
    build_ladder(R, l, OK);  // existence required
    Int count = 1;
    for (const auto& m : singular_primes(R, OK)) {
        if (m.lat == l.lat) continue;
        count *= Int(enumerate_l_overorders(R, m).size());
    }
    return count;
}

std::optional<std::pair<OrderPtr, MaximalIdeal>> find_base_order(const OrderPtr& O,
                                                                 const MaximalIdeal& L) {
    ZLattice L2 = lat_product(L.lat, L.lat);
    ZLattice bottom = lat_add_element(L2, elem_one(O->algebra()));
    // enumerate subgroups between bottom and O, keep the subrings
    std::set<std::string> seen;
    std::vector<ZLattice> stack{bottom};
    std::vector<ZLattice> subrings;
    seen.insert(bottom.key());
    while (!stack.empty()) {
        ZLattice M = stack.back();
        stack.pop_back();
        if (M != O->lattice() && lat_product(M, M) == M) subrings.push_back(M);
        for (const auto& x : coset_reps(O, M, 1ul << 16)) {
            if (M.contains(x)) continue;
            ZLattice grown = lat_add_element(M, x);
            if (seen.insert(grown.key()).second) stack.push_back(grown);
        }
    }
    // maximal proper subrings only
    std::vector<ZLattice> maximal;
    for (const auto& S : subrings) {
        bool is_max = true;
        for (const auto& S2 : subrings)
            if (!(S2 == S) && S2.contains_lattice(S)) {
                is_max = false;
                break;
            }
        if (is_max) maximal.push_back(S);
    }
    std::sort(maximal.begin(), maximal.end(),
              [](const ZLattice& a, const ZLattice& b) { return a.compare(b) < 0; });
    for (const auto& S : maximal) {
        OrderPtr cand = make_order(S);
        ZLattice l_lat = lat_intersect(L.lat, S);
        // l must be a maximal ideal of the candidate
        std::optional<MaximalIdeal> l;
        for (const auto& m : maximal_ideals_above(cand, L.ell))
            if (m.lat == l_lat) l = m;
        if (!l) continue;
        if (multiplicator_ring(l->lat)->lattice() != O->lattice()) continue;
        if (!is_bass_at(cand, *l)) continue;
        return std::make_pair(cand, *l);
    }
    return std::nullopt;
}

}  // namespace isovolc
