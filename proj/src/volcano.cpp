#include "isovolc/volcano.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isovolc/errors.hpp"

namespace isovolc {

unsigned UndirectedLeveledGraph::degree(size_t v) const {
    unsigned d = 0;
    for (const auto& e : edges) {
        if (e.first == v && e.second == v) {
            d += 1;  // loops count once
        } else if (e.first == v || e.second == v) {
            d += 1;
        }
    }
    return d;
}

bool UndirectedLeveledGraph::operator==(const UndirectedLeveledGraph& o) const {
    if (level != o.level) return false;
    auto a = edges, b = o.edges;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

UndirectedLeveledGraph undirect(const IsogenyGraph& g, UndirectKind which) {
    UndirectedLeveledGraph u;
    u.level.resize(g.vertices.size());
    u.component.resize(g.vertices.size());
    for (const auto& v : g.vertices) {
        u.level[v.id] = v.level;
        u.component[v.id] = v.component;
    }
    EdgeType want = which == UndirectKind::Ascending ? EdgeType::Ascending
                                                     : EdgeType::Descending;
    for (const auto& e : g.edges) {
        if (e.type != want) continue;
        u.edges.push_back({std::min(e.src, e.dst), std::max(e.src, e.dst)});
    }
    // horizontal pairing: k edges (a,b) match k edges (b,a); loops unchanged
    std::map<std::pair<size_t, size_t>, unsigned> fw;
    for (const auto& e : g.edges) {
        if (e.type != EdgeType::Horizontal) continue;
        if (e.src == e.dst) {
            u.edges.push_back({e.src, e.dst});
        } else {
            fw[{e.src, e.dst}] += 1;
        }
    }
    std::set<std::pair<size_t, size_t>> done;
    for (const auto& [key, cnt] : fw) {
        auto rev = std::make_pair(key.second, key.first);
        if (done.count(key) || done.count(rev)) continue;
        done.insert(key);
        done.insert(rev);
        auto it = fw.find(rev);
        unsigned match = it == fw.end() ? 0 : std::min(cnt, it->second);
        for (unsigned k = 0; k < match; ++k)
            u.edges.push_back({std::min(key.first, key.second),
                               std::max(key.first, key.second)});
    }
    std::sort(u.edges.begin(), u.edges.end());
    return u;
}

VolcanoCheck is_r_volcano(const UndirectedLeveledGraph& u, unsigned component) {
    VolcanoCheck out;
    std::vector<size_t> verts;
    for (size_t v = 0; v < u.level.size(); ++v)
        if (u.component[v] == component) verts.push_back(v);
    if (verts.empty()) {
        out.fail_reason = "empty component";
        return out;
    }
    unsigned dmax = 0;
    for (size_t v : verts) dmax = std::max(dmax, u.level[v]);
    // connectivity over the component's vertices
    {
        std::map<size_t, std::vector<size_t>> adj;
        for (const auto& e : u.edges) {
            if (u.component[e.first] != component) continue;
            adj[e.first].push_back(e.second);
            adj[e.second].push_back(e.first);
        }
        std::set<size_t> seen{verts[0]};
        std::vector<size_t> stack{verts[0]};
        while (!stack.empty()) {
            size_t v = stack.back();
            stack.pop_back();
            for (size_t w : adj[v])
                if (seen.insert(w).second) stack.push_back(w);
        }
        if (seen.size() != verts.size()) {
            out.fail_reason = "not connected";
            return out;
        }
    }
    // (1) surface regular of degree <= 2
    std::optional<unsigned> surf_deg;
    for (size_t v : verts) {
        if (u.level[v] != 0) continue;
        unsigned dv = 0;
        for (const auto& e : u.edges) {
            if (u.component[e.first] != component) continue;
            bool loop = e.first == e.second;
            if (u.level[e.first] != 0 || u.level[e.second] != 0) continue;
            if (loop && e.first == v)
                dv += 1;
            else if (!loop && (e.first == v || e.second == v))
                dv += 1;
        }
        if (!surf_deg) surf_deg = dv;
        if (*surf_deg != dv) {
            out.fail_reason = "surface not regular";
            return out;
        }
    }
    if (surf_deg && *surf_deg > 2) {
        out.fail_reason = "surface degree exceeds two";
        return out;
    }
    // (2) below the surface: exactly one edge up, no other non-surface edges
    for (const auto& e : u.edges) {
        if (u.component[e.first] != component) continue;
        unsigned l1 = u.level[e.first], l2 = u.level[e.second];
        if (l1 == 0 && l2 == 0) continue;
        unsigned lo = std::min(l1, l2), hi = std::max(l1, l2);
        if (hi != lo + 1) {
            out.fail_reason = "edge not between consecutive levels";
            return out;
        }
    }
    for (size_t v : verts) {
        if (u.level[v] == 0) continue;
        unsigned up = 0;
        for (const auto& e : u.edges) {
            if (u.component[e.first] != component) continue;
            if (e.first == v && u.level[e.second] == u.level[v] - 1) ++up;
            if (e.second == v && u.level[e.first] == u.level[v] - 1) ++up;
        }
        if (up != 1) {
            out.fail_reason = "vertex below the surface without a unique upward edge";
            return out;
        }
    }
    // (3) uniform degree r+1 off the bottom level
    std::optional<unsigned> rp1;
    for (size_t v : verts) {
        if (u.level[v] == dmax) continue;
        unsigned dv = 0;
        for (const auto& e : u.edges) {
            if (u.component[e.first] != component) continue;
            if (e.first == v && e.second == v)
                dv += 1;
            else if (e.first == v || e.second == v)
                dv += 1;
        }
        if (!rp1) rp1 = dv;
        if (*rp1 != dv) {
            out.fail_reason = "degree not uniform off the bottom";
            return out;
        }
    }
    out.ok = true;
    if (dmax > 0 && rp1) {
        if (*rp1 == 0) {
            out.ok = false;
            out.fail_reason = "zero degree off the bottom";
            return out;
        }
        out.r = *rp1 - 1;
    }
    return out;
}

VolcanoVerdict volcano_verdict(const IsogenyGraph& g, const GraphSpec& spec) {
    VolcanoVerdict v;
    UndirectedLeveledGraph ua = undirect(g, UndirectKind::Ascending);
    UndirectedLeveledGraph ud = undirect(g, UndirectKind::Descending);
    v.asc_eq_desc = (ua == ud);

    // structural: every component must agree (translation automorphism makes
    // them isomorphic; checked anyway)
    VolcanoCheck first = is_r_volcano(ua, 0);
    bool all_ok = first.ok;
    for (unsigned c = 1; c < g.components; ++c) {
        VolcanoCheck chk = is_r_volcano(ua, c);
        if (chk.ok != first.ok || chk.r != first.r) all_ok = false;
        if (!chk.ok) first = chk;
    }
    v.structural.is_volcano = all_ok && v.asc_eq_desc;
    v.structural.r = first.r;
    if (!v.asc_eq_desc)
        v.structural.reason = "ascending and descending graphs differ";
    else if (!all_ok)
        v.structural.reason = first.fail_reason;
    else
        v.structural.reason = "definition conditions hold";

    // predicted side from the closed-form conditions
    const ClassChainData& chain = spec.chain;
    unsigned d = g.d, d_min = g.d_min;
    auto principal_at = [&](unsigned level) -> std::optional<bool> {
        if (!chain.l_extension_class[level]) return std::nullopt;
        return chain.groups[level].is_zero(
            chain.groups[level].reduce(*chain.l_extension_class[level]));
    };
    if (d == 0) {
        v.predicted.covered = false;
        v.predicted.reason = "regular prime: no surface classification theorem";
    } else if (d_min == 0) {
        auto p0 = principal_at(0);
        if (!p0) {
            throw err("volcano", "MissingPrincipalityData",
                      "surface principality unknown");
        }
        if (chain.delta_l == 1 && !*p0) {
            v.predicted.covered = false;
            v.predicted.reason = "not covered by theorem";
            v.surface_note = "not covered by theorem: split surface with l O_0 non-principal";
        } else {
            v.predicted.is_volcano = *p0;
            v.predicted.reason = *p0 ? "l O_0 principal" : "l O_0 not principal";
        }
    } else {
        // d_min >= 1: three bullet conditions
        auto pb = principal_at(d_min - 1);
        if (!pb)
            throw err("volcano", "MissingPrincipalityData",
                      "l-extension class missing at level d_min - 1");
        bool principal = *pb && d_min < d;  // d_min == d already breaks asc == desc
        Rat ql(spec.l.residue_size);
        Rat r0 = Rat(chain.delta_l + 1);
        Rat r_surface = (ql - chain.delta_l) / Rat(chain.unit_indices[0]) + r0 - 1;
        r_surface.canonicalize();
        bool consistent = r_surface.get_den() == 1 && r_surface >= 1;
        for (unsigned i = 1; i < d_min && consistent; ++i) {
            Rat ri = ql / Rat(chain.unit_indices[i]);
            ri.canonicalize();
            if (ri != r_surface) consistent = false;
        }
        v.predicted.is_volcano = principal && consistent;
        if (v.predicted.is_volcano)
            v.predicted.r = static_cast<unsigned>(r_surface.get_num().get_ui());
        if (!principal)
            v.predicted.reason = d_min == d ? "bottom level misses descending edges"
                                            : "l O_{d_min - 1} not principal";
        else if (!consistent)
            v.predicted.reason = "level degrees do not match";
        else
            v.predicted.reason = "theorem conditions hold";
        if (chain.delta_l == 1) {
            auto p0 = principal_at(0);
            if (p0 && !*p0)
                v.surface_note =
                    "not covered by theorem: split surface with l O_0 non-principal";
        }
    }
    if (v.predicted.covered) {
        v.agreement = (v.structural.is_volcano == v.predicted.is_volcano) &&
                      (!v.structural.is_volcano || !v.predicted.r || !v.structural.r ||
                       *v.predicted.r == *v.structural.r);
    }
    return v;
}

std::string verdict_to_json(const VolcanoVerdict& v) {
    nlohmann::json j;
    auto side = [](const VolcanoVerdict::Side& s) {
        nlohmann::json js;
        js["is_volcano"] = s.is_volcano;
        if (s.r)
            js["r"] = *s.r;
        else
            js["r"] = nullptr;
        js["reason"] = s.reason;
        js["covered"] = s.covered;
        return js;
    };
    j["structural"] = side(v.structural);
    j["predicted"] = side(v.predicted);
    j["asc_eq_desc"] = v.asc_eq_desc;
    j["agreement"] = v.agreement;
    if (!v.surface_note.empty()) j["surface_note"] = v.surface_note;
    return j.dump(2);
}

}  // namespace isovolc
