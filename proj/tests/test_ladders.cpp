#include <doctest.h>

#include <map>

#include "isovolc/errors.hpp"
#include "isovolc/ladders.hpp"

using namespace isovolc;

namespace {

struct Fixture {
    AlgebraPtr alg;
    OrderPtr R;
    OrderPtr OK;
};

Fixture behaviours() {
    auto a = make_algebra({15625, 3750, 1450, 242, 58, 6, 1}, Int(25));
    return {a, order_zpi_qpi(a), maximal_order(a)};
}

Fixture jumps() {
    auto a = make_algebra({125, 50, -5, -4, -1, 2, 1}, Int(5));
    return {a, order_zpi_qpi(a), maximal_order(a)};
}

MaximalIdeal prime_with_residue(const OrderPtr& R, const Int& ell, const Int& rs) {
    for (const auto& m : maximal_ideals_above(R, ell))
        if (m.residue_size == rs && m.singular) return m;
    throw std::runtime_error("prime not found");
}

}  // namespace

TEST_CASE("splitting classification of the four behaviours") {
    Fixture f = behaviours();
    auto check = [&](const Int& ell, const Int& rs, SplittingType::Kind kind) {
        MaximalIdeal l = prime_with_residue(f.R, ell, rs);
        SplittingType st = classify_splitting(f.R, l);
        CHECK(st.kind == kind);
    };
    check(2, 2, SplittingType::Kind::Singular);
    check(2, 4, SplittingType::Kind::Split);
    check(3, 3, SplittingType::Kind::Inert);
    check(7, 7, SplittingType::Kind::Ramified);
}

TEST_CASE("inert classification for the quadratic conductor-3 order") {
    auto a = make_algebra({13, -4, 1}, Int(13));
    OrderPtr zpi = order_zpi(a);
    auto sing = maximal_ideals_above(zpi, 3);
    REQUIRE(sing.size() == 1);
    REQUIRE(sing[0].singular);
    SplittingType st = classify_splitting(zpi, sing[0]);
    CHECK(st.kind == SplittingType::Kind::Inert);
    CHECK(st.inert_degree == 2);
}

TEST_CASE("ladders of the all-behaviours order") {
    Fixture f = behaviours();
    std::map<std::pair<long, long>, unsigned> expected_d{
        {{2, 2}, 2}, {{2, 4}, 1}, {{3, 3}, 1}, {{7, 7}, 1}};
    for (const auto& m : singular_primes(f.R, f.OK)) {
        MultiplicatorLadder lad = build_ladder(f.R, m, f.OK);
        unsigned d = lad.d();
        CHECK(d == expected_d[{m.ell.get_si(), m.residue_size.get_si()}]);
        CHECK(ladder_length_from_conductor(lad) == d);
        // conductor law f_{R_i} = l^i f_{R_0} and rung law R_i = R + l^i f_{R_0}
        for (unsigned i = 0; i <= d; ++i) {
            ZLattice expect = lat_product(lat_pow(m.lat, i, f.OK->lattice()),
                                          lad.conductors[0]);
            CHECK(lad.conductors[i] == expect);
            CHECK(lad.rung(i)->lattice() == lat_sum(f.R->lattice(), expect));
        }
        // conductor single-step law through the whole chain
        for (unsigned i = 1; i <= d; ++i) {
            const MaximalIdeal& Li = *lad.level_prime[i];
            CHECK(lad.conductors[i] == lat_product(Li.lat, lad.conductors[i - 1]));
        }
        // bass at every singular prime here
        CHECK(is_bass_at(f.R, m));
    }
}

TEST_CASE("enumerate_overorders finds all 24 overorders") {
    Fixture f = behaviours();
    auto oos = enumerate_overorders(f.R, f.OK);
    CHECK(oos.size() == 24);
    auto brute = enumerate_overorders_brute(f.R, f.OK);
    CHECK(brute.size() == 24);
    for (size_t i = 0; i < oos.size(); ++i)
        CHECK(oos[i]->lattice() == brute[i]->lattice());
}

TEST_CASE("count_ladders per prime for the all-behaviours order") {
    Fixture f = behaviours();
    MaximalIdeal l2 = prime_with_residue(f.R, 2, 2);
    MaximalIdeal l4 = prime_with_residue(f.R, 2, 4);
    MaximalIdeal l3 = prime_with_residue(f.R, 3, 3);
    MaximalIdeal l7 = prime_with_residue(f.R, 7, 7);
    CHECK(count_ladders(f.R, l2, f.OK) == 8);
    CHECK(count_ladders(f.R, l4, f.OK) == 12);
    CHECK(count_ladders(f.R, l3, f.OK) == 12);
    CHECK(count_ladders(f.R, l7, f.OK) == 12);
}

TEST_CASE("jumps fixture: Hasse diagram, multiplicator arrows, conductors") {
    Fixture f = jumps();
    auto oos = enumerate_overorders(f.R, f.OK);
    REQUIRE(oos.size() == 8);
    // identify the orders by their index in O_K: 64, 32, 16, 8 (x3), 4, 1
    std::map<long, std::vector<OrderPtr>> by_index;
    for (const auto& S : oos)
        by_index[lat_index(f.OK->lattice(), S->lattice()).get_num().get_si()].push_back(S);
    REQUIRE(by_index[64].size() == 1);  // R
    REQUIRE(by_index[32].size() == 1);  // T3
    REQUIRE(by_index[16].size() == 1);  // S
    REQUIRE(by_index[8].size() == 3);   // T2, T2', T2''
    REQUIRE(by_index[4].size() == 1);   // T1
    REQUIRE(by_index[1].size() == 1);   // O_K
    OrderPtr R = by_index[64][0], T3 = by_index[32][0], S = by_index[16][0],
             T1 = by_index[4][0], OK = by_index[1][0];
    CHECK(R->lattice() == f.R->lattice());
    CHECK(OK->lattice() == f.OK->lattice());

    // covering indices along the chain are 2,2,2,2 and [O_K : T1] = 4
    CHECK(lat_index(T3->lattice(), R->lattice()) == 2);
    CHECK(lat_index(S->lattice(), T3->lattice()) == 2);
    for (const auto& T2 : by_index[8]) {
        CHECK(lat_index(T2->lattice(), S->lattice()) == 2);
        CHECK(lat_index(T1->lattice(), T2->lattice()) == 2);
    }
    CHECK(lat_index(OK->lattice(), T1->lattice()) == 4);

    // CM types: exactly T1, S, T3 have type 2 at their singular primes
    auto max_type_at_2 = [&](const OrderPtr& T) {
        unsigned t = 1;
        for (const auto& m : maximal_ideals_above(T, 2))
            if (m.singular) t = std::max(t, cm_type(T, m));
        return t;
    };
    CHECK(max_type_at_2(R) == 1);
    CHECK(max_type_at_2(T3) == 2);
    CHECK(max_type_at_2(S) == 2);
    for (const auto& T2 : by_index[8]) CHECK(max_type_at_2(T2) == 1);
    CHECK(max_type_at_2(T1) == 2);

    // multiplicator-ring arrows
    auto mult_ring_of_singular = [&](const OrderPtr& T) {
        auto sing = singular_primes(T, f.OK);
        REQUIRE(sing.size() == 1);
        return multiplicator_ring(sing[0].lat);
    };
    CHECK(mult_ring_of_singular(R)->lattice() == T3->lattice());
    // (l_T3 : l_T3) = T2 for exactly one of the index-8 orders
    OrderPtr T2_real = mult_ring_of_singular(T3);
    CHECK(lat_index(f.OK->lattice(), T2_real->lattice()) == 8);
    CHECK(mult_ring_of_singular(S)->lattice() == T1->lattice());
    for (const auto& T2 : by_index[8])
        CHECK(mult_ring_of_singular(T2)->lattice() == T1->lattice());
    CHECK(mult_ring_of_singular(T1)->lattice() == OK->lattice());

    // conductors: L^4, L^3, L^2 (x4), L^1 with L the O_K prime f_{T1}
    ZLattice L = conductor(T1, f.OK).lat;
    // L is a maximal ideal of O_K above 2
    bool found = false;
    for (const auto& P : maximal_ideals_above(f.OK, 2)) found |= (P.lat == L);
    CHECK(found);
    CHECK(conductor(R, f.OK).lat == lat_pow(L, 4, f.OK->lattice()));
    CHECK(conductor(T3, f.OK).lat == lat_pow(L, 3, f.OK->lattice()));
    CHECK(conductor(S, f.OK).lat == lat_pow(L, 2, f.OK->lattice()));
    for (const auto& T2 : by_index[8])
        CHECK(conductor(T2, f.OK).lat == lat_pow(L, 2, f.OK->lattice()));

    // quotient invariants of T1 / f_{T1} are consistent with f = L prime
    auto inv = quotient_invariants(T1->lattice(), L);
    Int prod = 1;
    for (const auto& v : inv) prod *= v;
    CHECK(prod == lat_index(T1->lattice(), L).get_num());
}

TEST_CASE("jumps: minimal overorder certificate fails on T3") {
    Fixture f = jumps();
    auto oos = enumerate_overorders(f.R, f.OK);
    OrderPtr T3;
    for (const auto& S : oos)
        if (lat_index(f.OK->lattice(), S->lattice()) == 32) T3 = S;
    REQUIRE(T3);
    auto sing = singular_primes(T3, f.OK);
    REQUIRE(sing.size() == 1);
    auto [T, unique] = minimal_l_overorder(T3, sing[0]);
    CHECK(lat_index(f.OK->lattice(), T->lattice()) == 8);  // T2, skipping S
    CHECK(!unique);
}

TEST_CASE("conductor law f_R = l f_T across fixture orders") {
    for (Fixture f : {behaviours(), jumps()}) {
        for (const auto& S : enumerate_overorders(f.R, f.OK)) {
            for (const auto& l : singular_primes(S, f.OK)) {
                OrderPtr T = multiplicator_ring(l.lat);
                CHECK(conductor(S, f.OK).lat ==
                      lat_product(l.lat, conductor(T, f.OK).lat));
            }
        }
    }
}

TEST_CASE("tot-ord-not-imply-Bass: ladder of length 2 without Bass") {
    auto a = make_algebra({64, -16, 12, -7, 3, -1, 1}, Int(4));
    OrderPtr R = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    auto sing = singular_primes(R, OK);
    REQUIRE(sing.size() == 2);  // conjugate pair above 2
    CHECK(sing[0].ell == 2);
    CHECK(sing[1].ell == 2);
    for (const auto& l : sing) {
        MultiplicatorLadder lad = build_ladder(R, l, OK);
        CHECK(lad.d() == 2);
        // the middle rung is not Gorenstein at l
        auto above = ideals_above_in(lad.rung(1), l);
        REQUIRE(above.size() == 1);
        CHECK(cm_type(lad.rung(1), above[0]) == 2);
        CHECK(!is_bass_at(R, l));
    }
}

TEST_CASE("cond-not-imply-tot-ord: jump detected, chain still totally ordered") {
    auto a = make_algebra({9, 0, -2, 0, 1}, Int(3));
    OrderPtr R = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    auto sing = singular_primes(R, OK);
    REQUIRE(sing.size() == 1);
    const MaximalIdeal& l = sing[0];
    CHECK(l.ell == 2);
    CHECK_THROWS_AS(build_ladder(R, l, OK), NotALadder);
    try {
        build_ladder(R, l, OK);
    } catch (const NotALadder& e) {
        CHECK(e.reason == "multiplicator-ring jump");
    }
    // 4 l-overorders, totally ordered (chain of length 3)
    auto oos = enumerate_l_overorders(R, l);
    REQUIRE(oos.size() == 4);
    for (size_t i = 0; i < oos.size(); ++i)
        for (size_t j = i + 1; j < oos.size(); ++j) {
            bool ij = oos[j]->lattice().contains_lattice(oos[i]->lattice());
            bool ji = oos[i]->lattice().contains_lattice(oos[j]->lattice());
            CHECK((ij || ji));
        }
    // conductor condition of the totally-ordered criterion holds
    std::sort(oos.begin(), oos.end(), [&](const OrderPtr& x, const OrderPtr& y) {
        return lat_index(OK->lattice(), x->lattice()).get_num() >
               lat_index(OK->lattice(), y->lattice()).get_num();
    });
    for (size_t i = 0; i + 1 < oos.size(); ++i) {
        ZLattice fi = colon(oos[i + 1]->lattice(), OK->lattice());
        CHECK(oos[i + 1]->lattice() == lat_sum(oos[i]->lattice(), fi));
    }
}

TEST_CASE("locate_in_ladder on the all-behaviours overorders") {
    Fixture f = behaviours();
    MaximalIdeal l2 = prime_with_residue(f.R, 2, 2);
    // T = R itself sits at level d of its own ladder
    auto [lad0, i0] = locate_in_ladder(f.R, l2, f.R, f.OK);
    CHECK(i0 == lad0.d());
    CHECK(lad0.base->lattice() == f.R->lattice());
    // every overorder is located; count distinct ladders = 8
    std::map<std::string, unsigned> ladder_keys;
    for (const auto& T : enumerate_overorders(f.R, f.OK)) {
        auto [lad, idx] = locate_in_ladder(f.R, l2, T, f.OK);
        CHECK(lad.rung(idx)->lattice() == T->lattice());
        ladder_keys[lad.base->lattice().key()] += 1;
    }
    CHECK(ladder_keys.size() == 8);
    for (const auto& [k, cnt] : ladder_keys) CHECK(cnt == 3);  // d = 2 rungs each
}

TEST_CASE("non-Bass fixture: six m-overorders, type 2, find_base_order") {
    auto a = make_algebra({1331, 121, 44, 73, 4, 1, 1}, Int(11));
    OrderPtr R2 = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    auto sing = singular_primes(R2, OK);
    REQUIRE(sing.size() == 2);
    MaximalIdeal m, L;
    for (const auto& s : sing) {
        if (s.ell == 2) m = s;
        if (s.ell == 5) L = s;
    }
    REQUIRE(m.ell == 2);
    REQUIRE(L.ell == 5);
    CHECK(is_bass_at(R2, L));
    CHECK(!is_bass_at(R2, m));

    // m-overorder lattice: 6 orders, one carrying CM type 2
    auto moos = enumerate_l_overorders(R2, m);
    CHECK(moos.size() == 6);
    unsigned type2 = 0;
    for (const auto& S : moos) {
        for (const auto& P : ideals_above_in(S, m))
            if (cm_type(S, P) == 2) ++type2;
    }
    CHECK(type2 == 1);
    // covering indices in the m-overorder poset are all 4
    for (const auto& S : moos)
        for (const auto& T : moos) {
            if (S->lattice() == T->lattice()) continue;
            if (!T->lattice().contains_lattice(S->lattice())) continue;
            Rat idx = lat_index(T->lattice(), S->lattice());
            bool covering = true;
            for (const auto& W : moos) {
                if (W->lattice() == S->lattice() || W->lattice() == T->lattice()) continue;
                if (T->lattice().contains_lattice(W->lattice()) &&
                    W->lattice().contains_lattice(S->lattice()))
                    covering = false;
            }
            if (covering) CHECK(idx == 4);
        }

    // L-ladder of R2: the 5-part of disc(h) is 5^3, so the index of Z[pi]
    // in O_K carries at most one factor of 5 and the ladder has length 1
    MultiplicatorLadder lad = build_ladder(R2, L, OK);
    CHECK(lad.d() == 1);
    CHECK(count_ladders(R2, L, OK) == 6);  // one per m-overorder

    // find_base_order returns Z + L^2, extending the ladder one level down
    auto res = find_base_order(R2, L);
    REQUIRE(res.has_value());
    ZLattice zl2 = lat_add_element(lat_product(L.lat, L.lat), elem_one(a));
    CHECK(res->first->lattice() == zl2);
    CHECK(is_bass_at(res->first, res->second));
    MultiplicatorLadder ext = build_ladder(res->first, res->second, OK);
    CHECK(ext.d() == 2);
    CHECK(ext.rung(1)->lattice() == R2->lattice());
}

TEST_CASE("frlOO1-not-inv: multiplicator ring O1 but not invertible, d = 2") {
    auto a = make_algebra({1331, -1331, 704, -255, 64, -11, 1}, Int(11));
    OrderPtr R = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    auto sing = singular_primes(R, OK);
    REQUIRE(sing.size() == 1);
    const MaximalIdeal& l = sing[0];
    CHECK(l.ell == 2);
    MultiplicatorLadder lad = build_ladder(R, l, OK);
    CHECK(lad.d() == 2);
    // l O_1 has multiplicator ring O_1 yet is not invertible
    ZLattice lO1 = lat_product(l.lat, lad.rung(1)->lattice());
    CHECK(multiplicator_ring(lO1)->lattice() == lad.rung(1)->lattice());
    ZLattice prod = lat_product(lO1, colon(lad.rung(1)->lattice(), lO1));
    CHECK(prod != lad.rung(1)->lattice());
    CHECK(!is_bass_at(R, l));
}

TEST_CASE("ladder properties: rungs above level 1 are Gorenstein at l") {
    Fixture f = behaviours();
    for (const auto& m : singular_primes(f.R, f.OK)) {
        MultiplicatorLadder lad = build_ladder(f.R, m, f.OK);
        for (unsigned i = 2; i <= lad.d(); ++i) {
            for (const auto& P : ideals_above_in(lad.rung(i), m))
                CHECK(cm_type(lad.rung(i), P) == 1);
        }
        // top has at most two maximal ideals above l, all regular
        auto top = ideals_above_in(lad.rung(0), m);
        CHECK(top.size() <= 2);
        for (const auto& P : top) CHECK(!P.singular);
    }
}

TEST_CASE("global and l-overorder Bass tests agree") {
    auto a = make_algebra({1331, 121, 44, 73, 4, 1, 1}, Int(11));
    OrderPtr R2 = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    for (const auto& l : singular_primes(R2, OK))
        CHECK(is_bass_at(R2, l) == is_bass_at_global(R2, l, OK));
}

TEST_CASE("cm type is a local invariant across parallel ladders") {
    auto a = make_algebra({15625, 3750, 1450, 242, 58, 6, 1}, Int(25));
    OrderPtr R = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    MaximalIdeal l2;
    for (const auto& m : maximal_ideals_above(R, 2))
        if (m.residue_size == 2) l2 = m;
    MultiplicatorLadder base = build_ladder(R, l2, OK);
    for (const auto& T : enumerate_overorders(R, OK)) {
        auto [lad, idx] = locate_in_ladder(R, l2, T, OK);
        for (unsigned i = 1; i <= lad.d(); ++i) {
            auto base_above = ideals_above_in(base.rung(i), l2);
            auto lad_above = ideals_above_in(lad.rung(i), l2);
            REQUIRE(base_above.size() == 1);
            REQUIRE(lad_above.size() == 1);
            CHECK(cm_type(base.rung(i), base_above[0]) ==
                  cm_type(lad.rung(i), lad_above[0]));
        }
    }
}

TEST_CASE("overorder conductors factor through the singular primes") {
    // every overorder is R + prod m_i^{k_i} O_K with that product as conductor
    Fixture f = behaviours();
    auto sing = singular_primes(f.R, f.OK);
    std::vector<MultiplicatorLadder> lads;
    for (const auto& m : sing) lads.push_back(build_ladder(f.R, m, f.OK));
    std::vector<unsigned> k(sing.size(), 0);
    for (;;) {
        ZLattice prod = f.OK->lattice();
        for (size_t i = 0; i < sing.size(); ++i)
            prod = lat_product(prod, lat_pow(sing[i].lat, k[i], f.OK->lattice()));
        OrderPtr S = make_order(lat_sum(f.R->lattice(), prod));
        CHECK(conductor(S, f.OK).lat == prod);
        size_t i = 0;
        for (; i < sing.size(); ++i) {
            k[i] += 1;
            if (k[i] <= lads[i].d()) break;
            k[i] = 0;
        }
        if (i == sing.size()) break;
    }
}

TEST_CASE("regular primes: trivial ladder, singleton l-overorders, NotSingular") {
    auto a = make_algebra({13, -4, 1}, Int(13));
    OrderPtr OK = maximal_order(a);
    auto above = maximal_ideals_above(OK, 7);  // good prime
    REQUIRE(!above.empty());
    const MaximalIdeal& l = above[0];
    REQUIRE(!l.singular);
    auto oos = enumerate_l_overorders(OK, l);
    CHECK(oos.size() == 1);
    MultiplicatorLadder lad = build_ladder(OK, l, OK);
    CHECK(lad.d() == 0);
    CHECK(ladder_length_from_conductor(lad) == 0);
    CHECK_THROWS_WITH_AS(minimal_l_overorder(OK, l), doctest::Contains("NotSingular"),
                         Error);
}

TEST_CASE("quotient size limit guards the exhaustive walk") {
    auto a = make_algebra({15625, 3750, 1450, 242, 58, 6, 1}, Int(25));
    OrderPtr R = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    CHECK_THROWS_WITH_AS(enumerate_orders_between(R, OK, 16),
                         doctest::Contains("QuotientTooLarge"), Error);
}
