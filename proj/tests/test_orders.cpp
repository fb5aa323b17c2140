#include <doctest.h>

#include "isovolc/errors.hpp"
#include "isovolc/maximalization.hpp"
#include "isovolc/orders.hpp"

using namespace isovolc;

namespace {

AlgebraPtr behaviours() {
    return make_algebra({15625, 3750, 1450, 242, 58, 6, 1}, Int(25));
}

}  // namespace

TEST_CASE("order_from_generators basics") {
    auto a = make_algebra({13, -4, 1}, Int(13));
    OrderPtr zpi = order_zpi(a);
    CHECK(zpi->lattice() == ZLattice::standard(a));
    // non-integral generator rejected
    CHECK_THROWS_WITH_AS(
        order_from_generators(a, {elem_from_coords(a, {Int(0), Int(1)}, 2)}),
        doctest::Contains("NotIntegral"), Error);
    // rank-deficient generators rejected
    CHECK_THROWS_WITH_AS(order_from_generators(a, {}), doctest::Contains("RankDeficient"),
                         Error);
}

TEST_CASE("index of Z[pi, q/pi] in the maximal order") {
    auto a = behaviours();
    OrderPtr R = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    CHECK(lat_index(OK->lattice(), R->lattice()) == Int(2 * 2 * 2 * 2 * 3 * 7));
}

TEST_CASE("maximal ideals above a good prime match factorization degrees") {
    // h = x^2-4x+13 mod 3 stays irreducible (3 inert, disc -4 field)
    auto a = make_algebra({13, -4, 1}, Int(13));
    OrderPtr OK = maximal_order(a);
    auto above3 = maximal_ideals_above(OK, 3);
    REQUIRE(above3.size() == 1);
    CHECK(above3[0].residue_size == 9);
    CHECK(!above3[0].singular);

    // 13 = pi * (4 - pi) splits
    auto above13 = maximal_ideals_above(OK, 13);
    CHECK(above13.size() == 2);
    for (const auto& m : above13) CHECK(m.residue_size == 13);
}

TEST_CASE("singular primes of the all-behaviours order") {
    auto a = behaviours();
    OrderPtr R = order_zpi_qpi(a);
    OrderPtr OK = maximal_order(a);
    auto sing = singular_primes(R, OK);
    REQUIRE(sing.size() == 4);
    std::vector<Int> sizes;
    for (const auto& m : sing) sizes.push_back(m.residue_size);
    // grouped by rational prime (2, then 3, then 7), residue-sorted within
    CHECK(sizes == std::vector<Int>{2, 4, 3, 7});
    for (const auto& m : sing) {
        CHECK(m.singular);
        // singular-prime identities:
        OrderPtr T = multiplicator_ring(m.lat);
        CHECK(T->lattice() != R->lattice());
        // (l:l) = (R:l)
        CHECK(T->lattice() == colon(R->lattice(), m.lat));
        // l (R:l) = l
        CHECK(lat_product(m.lat, colon(R->lattice(), m.lat)) == m.lat);
        // (R : (l:l)) = l
        CHECK(colon(R->lattice(), T->lattice()) == m.lat);
    }
}

TEST_CASE("regular primes of a maximal order") {
    auto a = behaviours();
    OrderPtr OK = maximal_order(a);
    for (Int ell : {Int(2), Int(3), Int(5), Int(7)}) {
        for (const auto& m : maximal_ideals_above(OK, ell)) {
            CHECK(!m.singular);
            // invertibility: m (OK:m) = OK
            CHECK(lat_product(m.lat, colon(OK->lattice(), m.lat)) == OK->lattice());
            CHECK(cm_type(OK, m) == 1);
        }
    }
}

TEST_CASE("base order of the jumps fixture is Gorenstein at 2") {
    auto a = make_algebra({125, 50, -5, -4, -1, 2, 1}, Int(5));
    OrderPtr R = order_zpi_qpi(a);
    CHECK(is_gorenstein_at(R, 2));
    OrderPtr OK = maximal_order(a);
    auto sing = singular_primes(R, OK);
    REQUIRE(sing.size() == 1);
    CHECK(sing[0].ell == 2);
    CHECK(cm_type(R, sing[0]) == 1);
}

TEST_CASE("residue sizes divide ell^n") {
    auto a = behaviours();
    OrderPtr R = order_zpi_qpi(a);
    for (Int ell : {Int(2), Int(3), Int(5), Int(7)}) {
        Int prod = 1;
        for (const auto& m : maximal_ideals_above(R, ell)) prod *= m.residue_size;
        Int elln = pow_int(ell, static_cast<unsigned long>(a->degree()));
        CHECK(divisible(elln, prod));
    }
}

TEST_CASE("order memoization returns identical handles") {
    auto a = behaviours();
    OrderPtr r1 = order_zpi_qpi(a);
    OrderPtr r2 = order_zpi_qpi(a);
    CHECK(r1.get() == r2.get());
}

TEST_CASE("order and ideal serialization carries a kind tag") {
    auto a = make_algebra({13, -4, 1}, Int(13));
    OrderPtr OK = maximal_order(a);
    std::string js = order_to_json(OK);
    CHECK(js.find("\"kind\":\"order\"") != std::string::npos);
    FractionalIdeal f = conductor(order_zpi(a), OK);
    CHECK(ideal_to_json(f).find("\"kind\":\"ideal\"") != std::string::npos);
}

namespace {

// independent oracle: the number of distinct irreducible factors of h mod ell
// via distinct-degree bookkeeping (gcds with x^{ell^d} - x), no ring splitting
unsigned factor_count_mod(const IntPoly& h, const Int& ell) {
    FlPoly hp = fl_make(ell, h);
    // strip repeated factors first
    std::vector<Int> dh;
    for (size_t i = 1; i < h.size(); ++i) dh.push_back(Int(i) * h[i]);
    FlPoly sq = fl_gcd(hp, fl_make(ell, dh));
    REQUIRE(fl_degree(sq) == 0);  // good primes only
    unsigned count = 0;
    FlPoly rem = hp;
    FlPoly x = fl_make(ell, {0, 1});
    for (unsigned d = 1; fl_degree(rem) > 0; ++d) {
        FlPoly xq = x;
        for (unsigned k = 0; k < d; ++k) xq = fl_powmod(xq, ell, rem);
        FlPoly g = fl_gcd(fl_sub(xq, x), rem);
        int deg = fl_degree(g);
        REQUIRE(deg % d == 0);
        count += static_cast<unsigned>(deg) / d;
        // divide rem by g
        if (deg > 0) {
            FlPoly q = rem;
            std::vector<Int> quot(rem.c.size() - g.c.size() + 1);
            Int lcinv = invmod(g.c.back(), ell);
            FlPoly r2 = rem;
            while (r2.c.size() >= g.c.size() && !r2.c.empty()) {
                Int f = fdiv_r(r2.c.back() * lcinv, ell);
                size_t off = r2.c.size() - g.c.size();
                quot[off] = f;
                for (size_t i = 0; i < g.c.size(); ++i)
                    r2.c[off + i] = fdiv_r(r2.c[off + i] - f * g.c[i], ell);
                while (!r2.c.empty() && r2.c.back() == 0) r2.c.pop_back();
            }
            REQUIRE(r2.c.empty());
            rem = fl_make(ell, quot);
        }
        if (static_cast<int>(d) > fl_degree(rem)) break;
    }
    return count;
}

}  // namespace

TEST_CASE("ideal counts above good primes match factor counts of h") {
    for (auto [coeffs, q] : std::vector<std::pair<IntPoly, Int>>{
             {{15625, 3750, 1450, 242, 58, 6, 1}, Int(25)},
             {{125, 50, -5, -4, -1, 2, 1}, Int(5)},
             {{10201, 1414, 89, 14, 1}, Int(101)}}) {
        auto a = make_algebra(coeffs, q);
        OrderPtr zpi = order_zpi(a);
        Int disc = a->discriminant();
        for (Int ell : {Int(11), Int(13), Int(17), Int(19), Int(29)}) {
            if (divisible(disc, ell)) continue;  // good primes only
            auto ms = maximal_ideals_above(zpi, ell);
            CHECK(ms.size() == factor_count_mod(a->h(), ell));
        }
    }
}
