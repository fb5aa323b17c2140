#ifndef ISOVOLC_LADDERS_HPP
#define ISOVOLC_LADDERS_HPP

#include <optional>
#include <variant>

#include "isovolc/errors.hpp"
#include "isovolc/maximalization.hpp"

namespace isovolc {

// Behavior of a singular maximal ideal l in its minimal overorder T = (l:l).
struct SplittingType {
    enum class Kind { Inert, Split, Ramified, Singular };
    Kind kind;
    unsigned inert_degree = 0;            // prime f, Inert only
    std::vector<MaximalIdeal> certificate;  // Split: the two ideals; Ramified/Singular: L

    int delta() const {
        switch (kind) {
            case Kind::Inert: return -1;
            case Kind::Ramified: return 0;
            case Kind::Split: return 1;
            default: return 2;  // Singular has no delta
        }
    }
    const char* name() const {
        switch (kind) {
            case Kind::Inert: return "inert";
            case Kind::Split: return "split";
            case Kind::Ramified: return "ramified";
            default: return "singular";
        }
    }
};

// R = R_d < R_{d-1} < ... < R_0, all the l-overorders of R; rung(i) = R_i.
struct MultiplicatorLadder {
    OrderPtr base;                        // R = rung(d)
    MaximalIdeal base_prime;              // l
    std::vector<OrderPtr> levels;         // levels[i] = R_i, i = 0..d
    std::vector<std::optional<MaximalIdeal>> level_prime;  // L_i for i >= 1
    std::vector<ZLattice> conductors;     // f_{R_i} against O_K
    std::optional<SplittingType> top_splitting;  // of L_1 in R_0 (d >= 1)
    OrderPtr maximal_order;

    unsigned d() const { return static_cast<unsigned>(levels.size() - 1); }
    const OrderPtr& rung(unsigned i) const { return levels[i]; }
};

class NotALadder : public Error {
public:
    NotALadder(std::string reason_code, unsigned rung, const std::string& msg)
        : Error("ladders", "NotALadder", msg),
          reason(std::move(reason_code)), rung_index(rung) {}
    std::string reason;  // "multiplicator-ring jump", "multiple-singular-primes",
                         // "extra-l-overorders"
    unsigned rung_index;
};

// All orders S with R <= S <= O; BFS over single-element saturations.
// Guarded by a quotient-size limit (default 2^16 group elements).
std::vector<OrderPtr> enumerate_orders_between(const OrderPtr& R, const OrderPtr& O,
                                               unsigned long limit = 1ul << 16);

// l-overorders of R: S with (R:S) = R or l-primary.
std::vector<OrderPtr> enumerate_l_overorders(const OrderPtr& R, const MaximalIdeal& l,
                                             unsigned long limit = 1ul << 16);

// T = (l:l) plus a certificate that T is the unique minimal l-overorder.
std::pair<OrderPtr, bool> minimal_l_overorder(const OrderPtr& R, const MaximalIdeal& l);

// Trichotomy of Prop-style minimal extensions; requires the uniqueness
// certificate (error NotMinimal otherwise, NotSingular for a regular l).
SplittingType classify_splitting(const OrderPtr& R, const MaximalIdeal& l);

// Builds and fully verifies the l-multiplicator ladder of R, including the
// "these are all the l-overorders" condition.  Throws NotALadder.
MultiplicatorLadder build_ladder(const OrderPtr& R, const MaximalIdeal& l,
                                 const OrderPtr& OK);

// Recomputes d from conductor valuations at the maximal-order primes above l
// and asserts it matches.  Error ValuationMismatch on inconsistency.
unsigned ladder_length_from_conductor(const MultiplicatorLadder& ladder);

// The unique ladder (over some base O with O_l = R_l) containing T, plus the
// level index of T in it.  Uses the decomposition T = S_1 + ... + S_n.
std::pair<MultiplicatorLadder, unsigned> locate_in_ladder(const OrderPtr& R,
                                                          const MaximalIdeal& l,
                                                          const OrderPtr& T,
                                                          const OrderPtr& OK);

// All overorders of R.  Fast path via per-prime ladders (R + prod m_i^{k_i} O_K),
// fallback exhaustive walk.
std::vector<OrderPtr> enumerate_overorders(const OrderPtr& R, const OrderPtr& OK,
                                           unsigned long limit = 1ul << 16);
std::vector<OrderPtr> enumerate_overorders_brute(const OrderPtr& R, const OrderPtr& OK,
                                                 unsigned long limit = 1ul << 16);

// Number of l-multiplicator ladders in the overorder set of R.
Int count_ladders(const OrderPtr& R, const MaximalIdeal& l, const OrderPtr& OK);

// Search for a maximal subring R of O with L^2 <= R, (l:l) = O for
// l = L cap R, and R Bass at l.  Deterministically first by canonical order.
std::optional<std::pair<OrderPtr, MaximalIdeal>> find_base_order(const OrderPtr& O,
                                                                 const MaximalIdeal& L);

// m_k-primary decomposition components of T over R, one per singular prime;
// verified to sum to T.
std::vector<OrderPtr> overorder_components(const OrderPtr& R, const OrderPtr& T,
                                           const std::vector<MaximalIdeal>& sing);

}  // namespace isovolc

#endif
