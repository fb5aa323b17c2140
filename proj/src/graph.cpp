#include "isovolc/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isovolc/errors.hpp"

namespace isovolc {

std::vector<Rat> newton_slopes(const IntPoly& h, const Int& p) {
    int n = poly_degree(h);
    // lower convex hull of (i, v_p(a_i)); segment slopes give root valuations
    // after negation; normalize by v_p(q) through e = v_p(h(0)) * 2 / n
    std::vector<std::pair<long, Int>> pts;  // (i, valuation), a_i != 0
    for (int i = 0; i <= n; ++i) {
        if (h[i] == 0) continue;
        pts.push_back({i, Int(valuation(h[i], p).first)});
    }
    // lower hull, left to right
    std::vector<std::pair<long, Int>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            // drop b if it lies above segment a-pt
            Rat sab = Rat(b.second - a.second, b.first - a.first);
            Rat sap = Rat(pt.second - a.second, pt.first - a.first);
            sab.canonicalize();
            sap.canonicalize();
            if (sab >= sap)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    // v_p(q): h(0) = +/- q^{n/2} for a Weil polynomial; recover e = v_p(q)
    unsigned v0 = valuation(h[0], p).first;
    if (v0 == 0 || (2 * v0) % n != 0)
        throw err("graph", "NotWeil", "h(0) valuation incompatible with a Weil polynomial");
    Int e = Int(2 * v0 / n);
    std::vector<Rat> slopes;
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        long len = hull[s + 1].first - hull[s].first;
        Rat slope = Rat(hull[s].second - hull[s + 1].second, Int(len) * e);
        slope.canonicalize();
        for (long k = 0; k < len; ++k) slopes.push_back(slope);
    }
    std::sort(slopes.begin(), slopes.end());
    return slopes;
}

IsogenyClassContext classify_isogeny_class(const AlgebraPtr& alg, std::optional<Int> user_n) {
    if (!alg->q() || !alg->p())
        throw err("graph", "NoFieldSize", "classification needs q and p");
    IsogenyClassContext ctx;
    ctx.algebra = alg;
    ctx.slopes = newton_slopes(alg->h(), *alg->p());
    size_t n = alg->degree();
    size_t g = n / 2;
    auto count = [&](const Rat& v) {
        return std::count(ctx.slopes.begin(), ctx.slopes.end(), v);
    };
    Rat half(1, 2);
    bool ordinary = count(Rat(0)) == static_cast<long>(g) && count(Rat(1)) == static_cast<long>(g);
    bool almost = count(Rat(0)) == static_cast<long>(g - 1) && count(half) == 2 &&
                  count(Rat(1)) == static_cast<long>(g - 1);
    if (ordinary) {
        ctx.kind = IsogenyClassContext::Kind::Ordinary;
    } else if (*alg->q() == *alg->p()) {
        ctx.kind = IsogenyClassContext::Kind::PrimeField;
    } else if (almost) {
        ctx.kind = IsogenyClassContext::Kind::AlmostOrdinary;
    } else {
        ctx.kind = IsogenyClassContext::Kind::Other;
    }
    switch (ctx.kind) {
        case IsogenyClassContext::Kind::Ordinary:
        case IsogenyClassContext::Kind::PrimeField:
            ctx.o_min = order_zpi_qpi(alg);
            ctx.orbit_count = Int(1);
            break;
        case IsogenyClassContext::Kind::AlmostOrdinary: {
            OrderPtr base = order_zpi_qpi(alg);
            // the unique maximal ideal containing p, pi and q/pi
            ZLattice pp = lat_add_element(
                lat_sum(lat_scale(base->lattice(), elem_pi(alg)),
                        lat_scale(base->lattice(), elem_q_over_pi(alg))),
                elem_int(alg, *alg->p()));
            ZLattice pl = lat_sum(pp, lat_scale_rat(base->lattice(), Rat(*alg->p())));
            std::optional<MaximalIdeal> target;
            for (const auto& m : maximal_ideals_above(base, *alg->p()))
                if (m.lat == pl) target = m;
            if (!target)
                throw err("graph", "Internal", "(p, pi, q/pi) is not maximal");
            ctx.o_min = p_saturation_at(base, *target);
            // N by ramification of the local-local prime in O_K: the
            // saturated order is maximal there, so read the residue degree
            std::optional<Int> rs;
            for (const auto& P : maximal_ideals_above(ctx.o_min, *alg->p())) {
                if (lat_intersect(P.lat, base->lattice()) == pl) rs = P.residue_size;
            }
            if (!rs) throw err("graph", "Internal", "local-local prime lost in saturation");
            ctx.orbit_count = (*rs == *alg->p()) ? Int(1) : Int(2);
            break;
        }
        case IsogenyClassContext::Kind::Other:
            if (!user_n)
                throw err("graph", "NeedUserN",
                          "orbit count is required for this isogeny class");
            ctx.orbit_count = *user_n;
            break;
    }
    if (user_n) ctx.orbit_count = *user_n;
    return ctx;
}

unsigned compute_d_min(const MultiplicatorLadder& ladder, const OrderPtr& o_min) {
    for (unsigned i = ladder.d() + 1; i-- > 0;) {
        if (ladder.rung(i)->lattice().contains_lattice(o_min->lattice())) return i;
    }
    throw err("graph", "LadderDisjoint", "no rung contains O_min");
}

namespace {

std::vector<Int> key_of(const std::vector<Int>& v) { return v; }

}  // namespace

IsogenyGraph build_graph(const GraphSpec& spec) {
    const ClassChainData& chain = spec.chain;
    unsigned d = spec.ladder.d();
    unsigned d_min = spec.d_min;
    if (d_min > d) throw err("graph", "BadSpec", "d_min exceeds d");
    if (chain.d() != d) throw err("graph", "BadSpec", "chain levels do not match the ladder");
    if (!is_bass_at(spec.R, spec.l))
        throw err("graph", "NotBass", "base order is not Bass at l");
    validate_chain(chain);
    validate_chain_against_ladder(chain, spec.ladder);

    const FiniteAbelianGroup& G0 = chain.groups[0];
    std::vector<std::vector<Int>> prime_gens;
    for (const auto& p : chain.primes_above_l) prime_gens.push_back(G0.reduce(p));
    auto cosets = G0.coset_reps(prime_gens);
    auto surface_subgroup = G0.subgroup_elements(prime_gens);

    IsogenyGraph g;
    g.d = d;
    g.d_min = d_min;
    g.missing_descending_at_bottom = (d_min == d && d > 0);

    unsigned n_orbits = static_cast<unsigned>(spec.N.get_ui());
    unsigned comp = 0;
    std::map<std::tuple<unsigned, unsigned, std::vector<Int>, unsigned>, size_t> index;

    for (unsigned orbit = 0; orbit < n_orbits; ++orbit) {
        for (const auto& coset : cosets) {
            // level-0 vertex classes = coset + surface subgroup
            std::vector<std::vector<Int>> level_classes;
            for (const auto& s : surface_subgroup) level_classes.push_back(G0.add(coset, s));
            std::sort(level_classes.begin(), level_classes.end());
            // vertices level by level: level i = preimage of the surface set
            std::vector<std::vector<std::vector<Int>>> levels{level_classes};
            for (unsigned i = 1; i <= d_min; ++i) {
                const FiniteAbelianGroup& Gi = chain.groups[i];
                std::vector<std::vector<Int>> lv;
                for (const auto& v : Gi.all_elements()) {
                    auto img = chain.to_surface(i, v);
                    if (std::binary_search(level_classes.begin(), level_classes.end(), img))
                        lv.push_back(v);
                }
                std::sort(lv.begin(), lv.end());
                levels.push_back(lv);
            }
            for (unsigned i = 0; i < levels.size(); ++i)
                for (const auto& v : levels[i]) {
                    GraphVertex vert{g.vertices.size(), comp, i, v, orbit};
                    index[{comp, i, key_of(v), orbit}] = vert.id;
                    g.vertices.push_back(vert);
                }
            auto vid = [&](unsigned level, const std::vector<Int>& cls) {
                auto it = index.find({comp, level, key_of(cls), orbit});
                if (it == index.end())
                    throw err("graph", "Internal", "vertex lookup failed");
                return it->second;
            };
            // horizontal edges at the surface
            if (chain.delta_l != -1) {
                for (const auto& v : levels[0])
                    for (const auto& gen : prime_gens) {
                        g.edges.push_back({vid(0, v), vid(0, G0.add(v, gen)),
                                           EdgeType::Horizontal});
                    }
            }
            // ascending and induced descending edges
            for (unsigned i = 1; i <= d_min; ++i) {
                for (const auto& v : levels[i]) {
                    auto img = chain.apply_surjection(i, v);
                    g.edges.push_back({vid(i, v), vid(i - 1, img), EdgeType::Ascending});
                    if (i <= d - 1) {
                        if (!chain.l_extension_class[i])
                            throw err("graph", "MissingPrincipalityData",
                                      "l-extension class missing at level " +
                                          std::to_string(i));
                        auto tgt = chain.groups[i].add(
                            v, chain.groups[i].reduce(*chain.l_extension_class[i]));
                        g.edges.push_back({vid(i - 1, img), vid(i, tgt),
                                           EdgeType::Descending});
                    }
                }
            }
            ++comp;
        }
    }
    g.components = comp;
    // deterministic edge order
    std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        if (a.src != b.src) return a.src < b.src;
        if (a.dst != b.dst) return a.dst < b.dst;
        return static_cast<int>(a.type) < static_cast<int>(b.type);
    });
    return g;
}

Int component_count(const GraphSpec& spec) {
    const FiniteAbelianGroup& G0 = spec.chain.groups[0];
    std::vector<std::vector<Int>> gens;
    for (const auto& p : spec.chain.primes_above_l) gens.push_back(G0.reduce(p));
    Int sub = G0.subgroup_order(gens);
    return spec.N * divexact(G0.order(), sub);
}

ConnectivityReport strong_connectivity_check(const IsogenyGraph& g) {
    ConnectivityReport rep;
    // Tarjan on each component's vertex set, optionally dropping the bottom
    bool drop_bottom = (g.d_min == g.d && g.d > 0);
    for (unsigned comp = 0; comp < g.components; ++comp) {
        std::vector<size_t> verts;
        std::map<size_t, size_t> local;
        for (const auto& v : g.vertices) {
            if (v.component != comp) continue;
            if (drop_bottom && v.level == g.d_min) continue;
            local[v.id] = verts.size();
            verts.push_back(v.id);
        }
        if (verts.empty()) continue;
        std::vector<std::vector<size_t>> adj(verts.size());
        for (const auto& e : g.edges) {
            auto a = local.find(e.src), b = local.find(e.dst);
            if (a == local.end() || b == local.end()) continue;
            adj[a->second].push_back(b->second);
        }
        // iterative Tarjan
        std::vector<int> idx(verts.size(), -1), low(verts.size(), 0);
        std::vector<bool> onstack(verts.size(), false);
        std::vector<size_t> stck;
        int counter = 0;
        int sccs = 0;
        struct Frame {
            size_t v;
            size_t child;
        };
        for (size_t root = 0; root < verts.size(); ++root) {
            if (idx[root] != -1) continue;
            std::vector<Frame> frames{{root, 0}};
            idx[root] = low[root] = counter++;
            stck.push_back(root);
            onstack[root] = true;
            while (!frames.empty()) {
                Frame& f = frames.back();
                if (f.child < adj[f.v].size()) {
                    size_t w = adj[f.v][f.child++];
                    if (idx[w] == -1) {
                        idx[w] = low[w] = counter++;
                        stck.push_back(w);
                        onstack[w] = true;
                        frames.push_back({w, 0});
                    } else if (onstack[w]) {
                        low[f.v] = std::min(low[f.v], idx[w]);
                    }
                } else {
                    if (low[f.v] == idx[f.v]) {
                        ++sccs;
                        for (;;) {
                            size_t w = stck.back();
                            stck.pop_back();
                            onstack[w] = false;
                            if (w == f.v) break;
                        }
                    }
                    size_t v = f.v;
                    frames.pop_back();
                    if (!frames.empty())
                        low[frames.back().v] = std::min(low[frames.back().v], low[v]);
                }
            }
        }
        if (sccs != 1) {
            rep.ok = false;
            rep.violations.push_back("component " + std::to_string(comp) + " splits into " +
                                     std::to_string(sccs) + " strongly connected pieces");
        }
    }
    return rep;
}

namespace {

std::string cls_str(const std::vector<Int>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].get_str();
    }
    return s + "]";
}

const char* type_str(EdgeType t) {
    switch (t) {
        case EdgeType::Horizontal: return "horizontal";
        case EdgeType::Ascending: return "ascending";
        default: return "descending";
    }
}

}  // namespace

std::string graph_to_json(const IsogenyGraph& g) {
    nlohmann::json j;
    j["components"] = g.components;
    j["d"] = g.d;
    j["d_min"] = g.d_min;
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : g.vertices) {
        nlohmann::json jv;
        jv["id"] = v.id;
        jv["component"] = v.component;
        jv["level"] = v.level;
        nlohmann::json cls = nlohmann::json::array();
        for (const auto& c : v.cls) cls.push_back(c.get_str());
        jv["class"] = cls;
        jv["orbit"] = v.orbit;
        vs.push_back(jv);
    }
    j["vertices"] = vs;
    nlohmann::json es = nlohmann::json::array();
    for (const auto& e : g.edges) {
        nlohmann::json je;
        je["src"] = e.src;
        je["dst"] = e.dst;
        je["type"] = type_str(e.type);
        es.push_back(je);
    }
    j["edges"] = es;
    return j.dump(2);
}

std::string graph_to_dot(const IsogenyGraph& g) {
    std::ostringstream os;
    os << "digraph isogeny {\n";
    os << "  rankdir=TB;\n";
    // one rank per level
    for (unsigned lvl = 0; lvl <= g.d_min; ++lvl) {
        os << "  { rank=same;";
        for (const auto& v : g.vertices)
            if (v.level == lvl) os << " v" << v.id << ";";
        os << " }\n";
    }
    for (const auto& v : g.vertices) {
        os << "  v" << v.id << " [label=\"c" << v.component << " L" << v.level << " "
           << cls_str(v.cls);
        if (v.orbit) os << " o" << v.orbit;
        os << "\"];\n";
    }
    for (const auto& e : g.edges) {
        os << "  v" << e.src << " -> v" << e.dst;
        switch (e.type) {
            case EdgeType::Horizontal:
                os << " [style=solid constraint=false]";
                break;
            case EdgeType::Ascending:
                os << " [style=solid arrowhead=normal]";
                break;
            case EdgeType::Descending:
                os << " [style=dashed]";
                break;
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace isovolc
