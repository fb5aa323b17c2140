#include "isovolc/maximalization.hpp"

#include <cstdlib>

#include "isovolc/errors.hpp"

namespace isovolc {

namespace {

unsigned long trial_bound() {
    if (const char* env = std::getenv("ISOVOLC_TRIAL_BOUND"))
        return std::strtoul(env, nullptr, 10);
    return 1000000;
}

}  // namespace

OrderPtr l_maximal_overorder(const OrderPtr& T, const Int& ell) {
    OrderPtr cur = T;
    for (;;) {
        ZLattice rad = radical_at(cur, ell);
        OrderPtr next = multiplicator_ring(rad);
        if (next->lattice() == cur->lattice()) return cur;
        cur = next;
    }
}

OrderPtr maximal_order(const AlgebraPtr& alg, const std::optional<FactoredIndex>& hints) {
    Int disc = alg->discriminant();
    std::map<Int, unsigned> fac;
    if (hints) {
        fac = factorize(disc, trial_bound(), &hints->primes);
    } else {
        fac = factorize(disc, trial_bound());
    }
    OrderPtr ok = order_zpi(alg);
    for (const auto& [p, e] : fac) {
        if (e < 2) continue;  // p-maximality is automatic when p^2 does not divide disc
        OrderPtr local = l_maximal_overorder(order_zpi(alg), p);
        if (local->lattice() != ok->lattice())
            ok = make_order(lat_sum(ok->lattice(), local->lattice()));
    }
    return ok;
}

FractionalIdeal conductor(const OrderPtr& T, const OrderPtr& OK) {
    ZLattice f = colon(T->lattice(), OK->lattice());
    return FractionalIdeal{std::move(f), OK};
}

FractionalIdeal conductor_l_part(const OrderPtr& T, const Int& ell) {
    OrderPtr O = l_maximal_overorder(T, ell);
    ZLattice f = colon(T->lattice(), O->lattice());
    return FractionalIdeal{std::move(f), O};
}

OrderPtr p_saturation_at(const OrderPtr& T, const MaximalIdeal& p) {
    OrderPtr cur = T;
    for (;;) {
        bool grew = false;
        for (const auto& P : maximal_ideals_above(cur, p.ell)) {
            if (!P.singular) continue;
            if (lat_intersect(P.lat, T->lattice()) != p.lat) continue;  // not over p
            cur = multiplicator_ring(P.lat);
            grew = true;
            break;
        }
        if (!grew) return cur;
    }
}

}  // namespace isovolc
