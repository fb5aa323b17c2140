#ifndef ISOVOLC_GRAPH_HPP
#define ISOVOLC_GRAPH_HPP

#include <optional>
#include <string>

#include "isovolc/classgroup.hpp"

namespace isovolc {

// Newton-polygon slopes of h at p, normalized to [0,1]; multiset ascending.
std::vector<Rat> newton_slopes(const IntPoly& h, const Int& p);

struct IsogenyClassContext {
    enum class Kind { Ordinary, AlmostOrdinary, PrimeField, Other };
    AlgebraPtr algebra;
    std::vector<Rat> slopes;
    Kind kind = Kind::Other;
    OrderPtr o_min;  // present unless kind == Other
    // orbit count rule: 1 for ordinary / prime field; almost ordinary by
    // ramification; user supplied otherwise
    std::optional<Int> orbit_count;

    const char* kind_name() const {
        switch (kind) {
            case Kind::Ordinary: return "ordinary";
            case Kind::AlmostOrdinary: return "almost-ordinary";
            case Kind::PrimeField: return "prime-field";
            default: return "other";
        }
    }
};

// Error NeedUserN when kind is Other and no override was given.
IsogenyClassContext classify_isogeny_class(const AlgebraPtr& alg,
                                           std::optional<Int> user_n = std::nullopt);

// deepest rung of the ladder containing O_min; LadderDisjoint when none does
unsigned compute_d_min(const MultiplicatorLadder& ladder, const OrderPtr& o_min);

struct GraphSpec {
    OrderPtr R;
    MaximalIdeal l;
    MultiplicatorLadder ladder;
    ClassChainData chain;
    unsigned d_min = 0;
    Int N = 1;
    bool n_unverified = false;  // user-supplied orbit count without a rule
};

enum class EdgeType { Horizontal, Ascending, Descending };

struct GraphVertex {
    size_t id;
    unsigned component;
    unsigned level;
    std::vector<Int> cls;  // exponent vector in Cl(O_level)
    unsigned orbit;
};

struct GraphEdge {
    size_t src, dst;
    EdgeType type;
};

struct IsogenyGraph {
    std::vector<GraphVertex> vertices;
    std::vector<GraphEdge> edges;
    unsigned components = 0;
    unsigned d_min = 0;
    unsigned d = 0;
    bool missing_descending_at_bottom = false;  // d_min == d warning
};

// Error NotBass when the base is not Bass at l.
IsogenyGraph build_graph(const GraphSpec& spec);

Int component_count(const GraphSpec& spec);

struct ConnectivityReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// strong connectivity per component, with the level-d_min stratum removed
// when d_min == d
ConnectivityReport strong_connectivity_check(const IsogenyGraph& g);

std::string graph_to_json(const IsogenyGraph& g);
std::string graph_to_dot(const IsogenyGraph& g);

}  // namespace isovolc

#endif
