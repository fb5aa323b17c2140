#ifndef ISOVOLC_LATTICE_HPP
#define ISOVOLC_LATTICE_HPP

#include <string>
#include <vector>

#include "isovolc/algebra.hpp"

namespace isovolc {

// Full-rank Z-lattice in K, stored as (1/den) * rowspan(basis) with basis in
// canonical row HNF (upper triangular, positive pivots, entries above each
// pivot reduced below it).  Equality of lattices is structural equality.
class ZLattice {
public:
    ZLattice() = default;

    static ZLattice from_rows(AlgebraPtr alg, MatZ rows, Int den);
    static ZLattice from_generators(AlgebraPtr alg, const std::vector<AlgebraElement>& gens);
    // Z[pi] as a module: the standard lattice with identity basis
    static ZLattice standard(AlgebraPtr alg);

    const AlgebraPtr& algebra() const { return alg_; }
    const MatZ& basis() const { return basis_; }
    const Int& denominator() const { return den_; }
    size_t rank() const { return basis_.rows(); }

    AlgebraElement element_at(size_t i) const;
    std::vector<AlgebraElement> basis_elements() const;

    bool contains(const AlgebraElement& x) const;
    bool contains_lattice(const ZLattice& other) const;
    bool contains_one() const;

    bool operator==(const ZLattice& o) const;
    bool operator!=(const ZLattice& o) const { return !(*this == o); }
    int compare(const ZLattice& o) const;  // deterministic total order

    std::string key() const;  // stable string key for memoization

    // covolume = det(basis)/den^n; used for generalized indices
    Rat covolume() const;

    std::string to_json() const;
    static ZLattice from_json(AlgebraPtr alg, const std::string& text);

private:
    AlgebraPtr alg_;
    Int den_ = 1;
    MatZ basis_;
};

ZLattice lat_sum(const ZLattice& a, const ZLattice& b);
ZLattice lat_add_element(const ZLattice& a, const AlgebraElement& x);  // a + Z*x
ZLattice lat_intersect(const ZLattice& a, const ZLattice& b);
ZLattice lat_product(const ZLattice& a, const ZLattice& b);
ZLattice lat_scale(const ZLattice& a, const AlgebraElement& x);  // x regular
ZLattice lat_scale_rat(const ZLattice& a, const Rat& r);
ZLattice lat_pow(const ZLattice& a, unsigned e, const ZLattice& unit);  // a^e, a^0 = unit

// (L1 : L2) = { x in K : x L2 <= L1 }
ZLattice colon(const ZLattice& l1, const ZLattice& l2);

// generalized index [L1 : L2] as a positive rational
Rat lat_index(const ZLattice& l1, const ZLattice& l2);

// invariant factors of L1/L2 for L2 <= L1 (throws NotContained otherwise);
// trivial factors dropped, product equals the index
std::vector<Int> quotient_invariants(const ZLattice& l1, const ZLattice& l2);

}  // namespace isovolc

#endif
