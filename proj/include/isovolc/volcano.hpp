#ifndef ISOVOLC_VOLCANO_HPP
#define ISOVOLC_VOLCANO_HPP

#include "isovolc/graph.hpp"

namespace isovolc {

// Undirected leveled multigraph.  A loop contributes exactly one to the
// degree of its vertex.
struct UndirectedLeveledGraph {
    std::vector<unsigned> level;                     // per vertex
    std::vector<std::pair<size_t, size_t>> edges;    // unordered pairs, src <= dst
    std::vector<unsigned> component;                 // per vertex (from the directed graph)

    unsigned degree(size_t v) const;
    bool operator==(const UndirectedLeveledGraph& o) const;
};

enum class UndirectKind { Ascending, Descending };

// Drops direction from ascending (resp. descending) edges; horizontal edges
// pair k edges (v1,v2) with k edges (v2,v1) into k undirected edges; loops
// stay as single undirected loops.
UndirectedLeveledGraph undirect(const IsogenyGraph& g, UndirectKind which);

struct VolcanoCheck {
    bool ok = false;
    std::optional<unsigned> r;  // determined only when levels > 1
    std::string fail_reason;
};

// Definition check on a single connected leveled graph (restricted to one
// component id).  Levels are 0..max present.
VolcanoCheck is_r_volcano(const UndirectedLeveledGraph& u, unsigned component);

struct VolcanoVerdict {
    struct Side {
        bool is_volcano = false;
        std::optional<unsigned> r;
        std::string reason;
        bool covered = true;  // false: theorem gives no answer for this shape
    };
    Side structural;
    Side predicted;
    bool asc_eq_desc = false;
    bool agreement = true;          // internal-error flag when false
    std::string surface_note;       // e.g. split non-principal annotation
};

// Per-component verdicts are identical by the class-group automorphism, so a
// single verdict is reported for the whole graph.
VolcanoVerdict volcano_verdict(const IsogenyGraph& g, const GraphSpec& spec);

std::string verdict_to_json(const VolcanoVerdict& v);

}  // namespace isovolc

#endif
