#include <doctest.h>

#include <random>

#include "isovolc/errors.hpp"
#include "isovolc/lattice.hpp"

using namespace isovolc;

namespace {

AlgebraPtr quad() { return make_algebra({13, -4, 1}, Int(13)); }

ZLattice random_lattice(std::mt19937_64& rng, const AlgebraPtr& a) {
    std::uniform_int_distribution<int> d(-6, 6);
    std::uniform_int_distribution<int> dd(1, 3);
    size_t n = a->degree();
    for (;;) {
        MatZ m(n + 1, n);
        for (size_t i = 0; i <= n; ++i)
            for (size_t j = 0; j < n; ++j) m.at(i, j) = d(rng);
        try {
            return ZLattice::from_rows(a, m, dd(rng));
        } catch (const Error&) {
            continue;  // rank deficient draw
        }
    }
}

}  // namespace

TEST_CASE("normal form idempotence and equality") {
    auto a = quad();
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        ZLattice L = random_lattice(rng, a);
        ZLattice L2 = ZLattice::from_rows(a, L.basis() * Int(3), L.denominator() * 3);
        CHECK(L == L2);  // scaling num and den cancels in normal form
        CHECK(lat_sum(L, L) == L);
    }
}

TEST_CASE("sum contains both, intersection contained in both") {
    auto a = quad();
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        ZLattice A = random_lattice(rng, a), B = random_lattice(rng, a);
        ZLattice S = lat_sum(A, B), I = lat_intersect(A, B);
        CHECK(S.contains_lattice(A));
        CHECK(S.contains_lattice(B));
        CHECK(A.contains_lattice(I));
        CHECK(B.contains_lattice(I));
        // [S:A][A:I] = [S:B][B:I] (both equal [S:I])
        CHECK(lat_index(S, A) * lat_index(A, I) == lat_index(S, B) * lat_index(B, I));
    }
}

TEST_CASE("product of principal lattices") {
    auto a = quad();
    ZLattice O = ZLattice::standard(a);  // Z[pi] as a lattice
    AlgebraElement x = elem_from_coords(a, {Int(2), Int(1)}, 1);
    AlgebraElement y = elem_from_coords(a, {Int(-1), Int(3)}, 2);
    ZLattice xO = lat_scale(O, x), yO = lat_scale(O, y);
    CHECK(lat_product(xO, yO) == lat_scale(O, elem_mul(x, y)));
}

TEST_CASE("product against pairwise span oracle") {
    // m = 3Z + (1+pi)Z inside Z[pi]
    auto a = quad();
    ZLattice m = ZLattice::from_generators(
        a, {elem_int(a, 3), elem_add(elem_one(a), elem_pi(a))});
    ZLattice m2 = lat_product(m, m);
    // oracle: span of all pairwise products
    std::vector<AlgebraElement> gens;
    for (size_t i = 0; i < 2; ++i)
        for (size_t j = 0; j < 2; ++j) gens.push_back(elem_mul(m.element_at(i), m.element_at(j)));
    CHECK(m2 == ZLattice::from_generators(a, gens));
}

TEST_CASE("colon basics") {
    auto a = quad();
    ZLattice O = ZLattice::standard(a);
    SUBCASE("colon(L, L) is a ring containing 1") {
        std::mt19937_64 rng(7);
        for (int t = 0; t < 10; ++t) {
            ZLattice L = random_lattice(rng, a);
            ZLattice E = colon(L, L);
            CHECK(E.contains_one());
            CHECK(lat_product(E, E) == E);
            CHECK(lat_product(E, L) == L);
        }
    }
    SUBCASE("colon(xO, O) = xO") {
        AlgebraElement x = elem_from_coords(a, {Int(5), Int(2)}, 3);
        CHECK(colon(lat_scale(O, x), O) == lat_scale(O, x));
    }
}

TEST_CASE("colon monotonicity and product bound") {
    auto a = quad();
    std::mt19937_64 rng(11);
    for (int t = 0; t < 15; ++t) {
        ZLattice L1 = random_lattice(rng, a);
        ZLattice L2 = random_lattice(rng, a);
        ZLattice L2big = lat_sum(L2, random_lattice(rng, a));
        // antitone in the second argument
        CHECK(colon(L1, L2).contains_lattice(colon(L1, L2big)));
        // monotone in the first argument
        ZLattice L1big = lat_sum(L1, random_lattice(rng, a));
        CHECK(colon(L1big, L2).contains_lattice(colon(L1, L2)));
        // x in (L2:L1) means x L1 <= L2
        CHECK(L2.contains_lattice(lat_product(L1, colon(L2, L1))));
    }
}

TEST_CASE("index multiplicativity on chains") {
    auto a = quad();
    std::mt19937_64 rng(13);
    for (int t = 0; t < 15; ++t) {
        ZLattice A = random_lattice(rng, a);
        ZLattice B = lat_sum(A, random_lattice(rng, a));
        ZLattice C = lat_sum(B, random_lattice(rng, a));
        CHECK(lat_index(C, A) == lat_index(C, B) * lat_index(B, A));
    }
}

TEST_CASE("index of the conductor order") {
    // [O_K : Z[pi]] = 3 for disc -36 over disc -4
    auto a = quad();
    ZLattice zpi = ZLattice::standard(a);
    // O_K = Z + Z (pi-2)/3 ... the element (2+pi)/3? disc -36 = 3^2 * (-4):
    // integral closure has basis 1, (pi - 2)/3 * ... verify via (pi-2)/3:
    // ((pi-2)/3)^2 = (pi^2 - 4 pi + 4)/9 = (4 pi - 13 - 4 pi + 4)/9 = -1
    AlgebraElement w = elem_from_coords(a, {Int(-2), Int(1)}, 3);
    CHECK(elem_mul(w, w) == elem_int(a, -1));
    ZLattice ok = lat_add_element(zpi, w);
    CHECK(lat_index(ok, zpi) == 3);
    CHECK(lat_product(ok, ok) == ok);
}

TEST_CASE("quotient invariants") {
    auto a = quad();
    ZLattice O = ZLattice::standard(a);
    ZLattice L3 = lat_scale_rat(O, Rat(6));
    auto inv = quotient_invariants(O, L3);
    CHECK(inv == std::vector<Int>{6, 6});
    CHECK_THROWS_WITH_AS(quotient_invariants(L3, O), doctest::Contains("NotContained"), Error);
    CHECK(lat_index(O, L3) == 36);
}

TEST_CASE("json round trip") {
    auto a = quad();
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        ZLattice L = random_lattice(rng, a);
        CHECK(ZLattice::from_json(a, L.to_json()) == L);
    }
}

TEST_CASE("mismatched algebras are rejected") {
    auto a = quad();
    auto b = make_algebra({7, 0, 1});
    CHECK_THROWS_WITH_AS(lat_sum(ZLattice::standard(a), ZLattice::standard(b)),
                         doctest::Contains("MismatchedAlgebra"), Error);
}
