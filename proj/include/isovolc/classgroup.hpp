#ifndef ISOVOLC_CLASSGROUP_HPP
#define ISOVOLC_CLASSGROUP_HPP

#include <optional>
#include <string>
#include <vector>

#include "isovolc/ladders.hpp"

namespace isovolc {

// Finite abelian group as invariant factors d1 | d2 | ...; elements are
// exponent vectors mod the factors.  Trivial factors are dropped, so the
// trivial group has an empty factor list.
struct FiniteAbelianGroup {
    std::vector<Int> factors;

    size_t rank() const { return factors.size(); }
    Int order() const;
    std::vector<Int> zero() const { return std::vector<Int>(factors.size()); }
    std::vector<Int> reduce(std::vector<Int> v) const;
    std::vector<Int> add(const std::vector<Int>& a, const std::vector<Int>& b) const;
    std::vector<Int> neg(const std::vector<Int>& a) const;
    std::vector<Int> smul(const Int& k, const std::vector<Int>& a) const;
    bool is_zero(const std::vector<Int>& a) const;
    Int element_order(const std::vector<Int>& a) const;

    // subgroup generated by rows; returns its order
    Int subgroup_order(const std::vector<std::vector<Int>>& gens) const;
    bool in_subgroup(const std::vector<Int>& v, const std::vector<std::vector<Int>>& gens) const;
    // coset representatives of the subgroup, deterministic order
    std::vector<std::vector<Int>> coset_reps(const std::vector<std::vector<Int>>& gens) const;
    // all elements of the subgroup generated by gens
    std::vector<std::vector<Int>> subgroup_elements(const std::vector<std::vector<Int>>& gens) const;
    std::vector<std::vector<Int>> all_elements() const;
};

// Class-group chain along a ladder: groups Cl(O_i) for i = 0..d, connecting
// surjections Cl(O_{i+1}) -> Cl(O_i), distinguished classes and unit indices.
struct ClassChainData {
    std::vector<FiniteAbelianGroup> groups;          // level 0..d
    std::vector<MatZ> surjections;                   // [i]: level i+1 -> level i
    std::vector<std::vector<Int>> primes_above_l;    // classes in Cl(O_0), 1 or 2
    std::vector<std::optional<std::vector<Int>>> l_extension_class;  // per level
    std::vector<Int> unit_indices;                   // [i] = [O_i^x : O_{i+1}^x], i = 0..d-1
    int delta_l = 0;

    unsigned d() const { return static_cast<unsigned>(groups.size() - 1); }
    std::vector<Int> apply_surjection(unsigned from_level, const std::vector<Int>& v) const;
    // composed map Cl(O_level) -> Cl(O_0)
    std::vector<Int> to_surface(unsigned level, const std::vector<Int>& v) const;
};

// #Cl(R)/#Cl(T) for the minimal overorder step, by the three-case formula.
Rat ratio_min_overorder(const OrderPtr& R, const MaximalIdeal& l, const OrderPtr& T,
                        const SplittingType& st, const Int& unit_index);

// ratio #Cl(O_i)/#Cl(O_{i-1}) for i = 1..d along a ladder
std::vector<Rat> ladder_ratios(const MultiplicatorLadder& ladder,
                               const std::vector<Int>& unit_indices);

// ---- binary quadratic forms (negative discriminant, primitive) ----

struct BQForm {
    Int a, b, c;
    Int disc() const { return b * b - 4 * a * c; }
    bool operator==(const BQForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const BQForm& o) const;
};

BQForm form_reduce(BQForm f);
BQForm form_identity(const Int& D);
BQForm form_inverse(const BQForm& f);
BQForm form_compose(const BQForm& f, const BQForm& g);
std::vector<BQForm> reduced_forms(const Int& D);

// Full chain data for an imaginary quadratic ladder, computed from first
// principles (forms for the groups, ideal extension for the maps, torsion
// unit counts for the indices).  Error NotImaginaryQuadratic.
ClassChainData imquad_class_data(const MultiplicatorLadder& ladder);

// schema-checked load; InconsistentRatios is raised by the ladder validator
ClassChainData load_external_chain(const std::string& path);
ClassChainData parse_chain_json(const std::string& text);

// structural invariants (surjectivity, commutation with l-extension classes,
// delta vs prime count); SchemaError on failure
void validate_chain(const ClassChainData& chain);

// ratio consistency against the ladder (unit indices present in the chain);
// InconsistentRatios names the failing level
void validate_chain_against_ladder(const ClassChainData& chain,
                                   const MultiplicatorLadder& ladder);

// ---- imaginary quadratic helpers exposed for tests ----

// torsion unit count of the order of discriminant D < 0
unsigned imquad_unit_count(const Int& D);

// discriminant of a rank-2 order
Int order_disc_quadratic(const OrderPtr& O);

// form attached to a proper O-ideal lattice, reduced
BQForm form_of_ideal(const ZLattice& I, const OrderPtr& O);
// lattice of the ideal attached to a form of disc(O)
ZLattice ideal_of_form(const BQForm& f, const OrderPtr& O);

// exhaustive norm-equation principality test (oracle)
bool imquad_ideal_principal_bruteforce(const ZLattice& I, const OrderPtr& O);

}  // namespace isovolc

#endif
