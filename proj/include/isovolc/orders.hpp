#ifndef ISOVOLC_ORDERS_HPP
#define ISOVOLC_ORDERS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "isovolc/lattice.hpp"

namespace isovolc {

class Order;

// Fractional ideal with a designated order multiplying it into itself.
struct FractionalIdeal {
    ZLattice lat;
    std::shared_ptr<const Order> over;
};

// Maximal ideal of an order, certified by the construction in
// maximal_ideals_above: residue_size = #(R/m) = ell^f.
struct MaximalIdeal {
    ZLattice lat;
    std::shared_ptr<const Order> order;
    Int ell;
    Int residue_size;
    bool singular = false;
};

// Multiplicatively closed full lattice containing 1.  Orders are memoized by
// canonical lattice form; the cache behaves as a concurrent map with
// idempotent entries.
class Order {
public:
    const ZLattice& lattice() const { return lat_; }
    const AlgebraPtr& algebra() const { return lat_.algebra(); }
    size_t degree() const { return lat_.algebra()->degree(); }

    bool operator==(const Order& o) const { return lat_ == o.lat_; }
    bool operator!=(const Order& o) const { return !(*this == o); }
    int compare(const Order& o) const { return lat_.compare(o.lat_); }

    // structure constants: coords of b_i * b_j in the order basis
    const std::vector<MatZ>& structure() const;

    Int discriminant() const;  // det of the trace Gram of the basis

    friend std::shared_ptr<const Order> make_order(ZLattice lat);

private:
    Order() = default;
    ZLattice lat_;
    mutable std::once_flag structure_once_;
    mutable std::vector<MatZ> structure_;
};

using OrderPtr = std::shared_ptr<const Order>;

// Validates 1 in L and L*L = L; errors NotAnOrder otherwise.
OrderPtr make_order(ZLattice lat);

// Smallest order containing Z and the given integral elements.
// Errors: NotIntegral, RankDeficient.
OrderPtr order_from_generators(AlgebraPtr alg, const std::vector<AlgebraElement>& gens);

OrderPtr order_zpi(AlgebraPtr alg);      // Z[pi]
OrderPtr order_zpi_qpi(AlgebraPtr alg);  // Z[pi, q/pi]

// Complete list of maximal ideals of T above the rational prime ell,
// deterministically ordered by (residue_size, lattice).
std::vector<MaximalIdeal> maximal_ideals_above(const OrderPtr& T, const Int& ell);

// Nilradical preimage: ell*T + lifts of the nilradical of T/ell T.
ZLattice radical_at(const OrderPtr& T, const Int& ell);

OrderPtr multiplicator_ring(const ZLattice& ideal);
bool is_singular(const MaximalIdeal& m);

// dim over T/m of (T:m)/T; 1 iff T is Gorenstein at m
unsigned cm_type(const OrderPtr& T, const MaximalIdeal& m);

bool is_gorenstein_at(const OrderPtr& T, const Int& ell);

// Checks every l-overorder of R is Gorenstein at the ideals above l.
// Enumeration provided by the ladders machinery.
bool is_bass_at(const OrderPtr& R, const MaximalIdeal& l);

// Same property checked against every overorder (not just l-overorders);
// agrees with is_bass_at, kept for cross-checking on small quotients.
bool is_bass_at_global(const OrderPtr& R, const MaximalIdeal& l, const OrderPtr& OK);

// singular maximal ideals of R (those containing the conductor), given the
// maximal order
std::vector<MaximalIdeal> singular_primes(const OrderPtr& R, const OrderPtr& OK);

// the maximal ideal of T lying over l (unique ones with L cap R = l.lat)
std::vector<MaximalIdeal> ideals_above_in(const OrderPtr& T, const MaximalIdeal& l);

// lattice JSON plus a kind tag ("order" / "ideal")
std::string order_to_json(const OrderPtr& O);
std::string ideal_to_json(const FractionalIdeal& I);

}  // namespace isovolc

#endif
