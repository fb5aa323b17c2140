// Command-line front end: ladder analysis, overorder lattices, prime
// classification, isogeny-graph synthesis, volcano verdicts, LMFDB lookups.
//
// Exit codes: 0 success, 1 domain failure (structured JSON on stderr),
// 2 usage error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "isovolc/errors.hpp"
#include "isovolc/graph.hpp"
#include "isovolc/lmfdb.hpp"
#include "isovolc/volcano.hpp"

using namespace isovolc;

namespace {

struct InputOptions {
    std::string label;
    std::string poly_file;
    bool offline = false;
    std::string disc_factors;
    std::string order_spec = "Z[pi,q/pi]";
    Int ell = 0;
    std::string residue_size;
    int prime_index = 0;
    std::string class_data = "imquad";
    std::string dot_path, json_path;
    std::string n_override;
    int dmin_override = -1;
    bool all_ladders = false;
};

struct Resolved {
    AlgebraPtr alg;
    OrderPtr OK;
    OrderPtr order;       // the order named by --order (before any auto step)
    OrderPtr R;           // base order of the pipeline
    std::optional<MaximalIdeal> l;
};

std::optional<FactoredIndex> parse_hints(const std::string& s) {
    if (s.empty()) return std::nullopt;
    FactoredIndex f;
    f.source = FactoredIndex::Source::user_supplied;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto caret = part.find('^');
        Int p = int_from_string(caret == std::string::npos ? part : part.substr(0, caret));
        unsigned e = caret == std::string::npos
                         ? 1
                         : static_cast<unsigned>(std::stoul(part.substr(caret + 1)));
        f.primes[p] = e;
    }
    return f;
}

AlgebraPtr load_algebra(const InputOptions& in) {
    if (!in.label.empty()) {
        FetchOptions fo;
        fo.offline = in.offline;
        WeilRecord rec = fetch(in.label, fo);
        return make_algebra(rec.h, rec.q, rec.p);
    }
    std::ifstream f(in.poly_file);
    if (!f) throw err("cli", "UsageError", "cannot open polynomial file " + in.poly_file);
    nlohmann::json j = nlohmann::json::parse(f);
    IntPoly h;
    for (const auto& c : j.at("h")) h.push_back(int_from_string(c.get<std::string>()));
    std::optional<Int> q;
    if (j.contains("q")) q = int_from_string(j["q"].get<std::string>());
    return make_algebra(h, q);
}

// order expressions: "Z[pi]", "Z[pi,q/pi]", or "auto"
OrderPtr named_order(const AlgebraPtr& alg, const std::string& spec) {
    if (spec == "Z[pi]") return order_zpi(alg);
    if (spec == "Z[pi,q/pi]" || spec == "auto") return order_zpi_qpi(alg);
    throw err("cli", "UsageError", "unsupported order expression: " + spec);
}

MaximalIdeal select_prime(const OrderPtr& R, const InputOptions& in) {
    if (in.ell == 0) throw err("cli", "UsageError", "--ell is required");
    auto all = maximal_ideals_above(R, in.ell);
    std::vector<MaximalIdeal> match;
    for (const auto& m : all) {
        if (!in.residue_size.empty() && m.residue_size != int_from_string(in.residue_size))
            continue;
        match.push_back(m);
    }
    if (match.empty()) throw err("cli", "UsageError", "no maximal ideal matches the selector");
    if (in.prime_index < 0 || static_cast<size_t>(in.prime_index) >= match.size())
        throw err("cli", "UsageError", "prime index out of range");
    return match[static_cast<size_t>(in.prime_index)];
}

Resolved resolve(const InputOptions& in, bool need_prime) {
    Resolved r;
    r.alg = load_algebra(in);
    r.OK = maximal_order(r.alg, parse_hints(in.disc_factors));
    r.order = named_order(r.alg, in.order_spec);
    r.R = r.order;
    if (!need_prime) return r;
    MaximalIdeal sel = select_prime(r.order, in);
    if (in.order_spec == "auto") {
        auto fb = find_base_order(r.order, sel);
        if (!fb)
            throw err("cli", "NoBaseOrder", "no Bass base order below the selected prime");
        r.R = fb->first;
        r.l = fb->second;
    } else {
        r.l = sel;
    }
    return r;
}

void write_output(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw err("cli", "UsageError", "cannot write " + path);
    f << content;
}

std::string conductor_valuations(const MultiplicatorLadder& lad, unsigned level) {
    // valuations of f_{R_level} at the maximal-order primes above ell
    const OrderPtr& OK = lad.maximal_order;
    std::ostringstream os;
    os << "[";
    bool first = true;
    for (const auto& P : maximal_ideals_above(OK, lad.base_prime.ell)) {
        unsigned v = 0;
        ZLattice pw = OK->lattice();
        for (;;) {
            pw = lat_product(pw, P.lat);
            if (!pw.contains_lattice(lad.conductors[level])) break;
            ++v;
        }
        if (!first) os << ",";
        first = false;
        os << v;
    }
    os << "]";
    return os.str();
}

int cmd_ladder(const InputOptions& in) {
    Resolved r = resolve(in, true);
    MultiplicatorLadder lad = build_ladder(r.R, *r.l, r.OK);
    std::cout << "ladder at ell=" << r.l->ell << " residue=" << r.l->residue_size
              << ": d = " << lad.d() << "\n";
    for (unsigned i = 0; i <= lad.d(); ++i) {
        std::cout << "  level " << i << ": index in O_K = "
                  << lat_index(r.OK->lattice(), lad.rung(i)->lattice())
                  << ", conductor valuations " << conductor_valuations(lad, i);
        bool gor = is_gorenstein_at(lad.rung(i), r.l->ell);
        std::cout << (gor ? ", Gorenstein" : ", not Gorenstein") << "\n";
    }
    if (lad.top_splitting)
        std::cout << "top splitting: " << lad.top_splitting->name() << "\n";
    std::cout << "Bass at l: " << (is_bass_at(r.R, *r.l) ? "yes" : "no") << "\n";
    return 0;
}

int cmd_overorders(const InputOptions& in) {
    Resolved r = resolve(in, false);
    auto oos = enumerate_overorders(r.R, r.OK);
    std::cout << oos.size() << " overorders\n";
    // Hasse diagram in DOT: edges are covering relations
    std::ostringstream os;
    os << "digraph overorders {\n  rankdir=BT;\n";
    for (size_t i = 0; i < oos.size(); ++i)
        os << "  o" << i << " [label=\"index "
           << lat_index(r.OK->lattice(), oos[i]->lattice()).get_num().get_str() << "\"];\n";
    for (size_t i = 0; i < oos.size(); ++i)
        for (size_t j = 0; j < oos.size(); ++j) {
            if (i == j) continue;
            if (!oos[j]->lattice().contains_lattice(oos[i]->lattice())) continue;
            if (oos[j]->lattice() == oos[i]->lattice()) continue;
            bool covering = true;
            for (size_t k = 0; k < oos.size() && covering; ++k) {
                if (k == i || k == j) continue;
                if (oos[k]->lattice().contains_lattice(oos[i]->lattice()) &&
                    oos[j]->lattice().contains_lattice(oos[k]->lattice()) &&
                    oos[k]->lattice() != oos[i]->lattice() &&
                    oos[k]->lattice() != oos[j]->lattice())
                    covering = false;
            }
            if (covering)
                os << "  o" << i << " -> o" << j << " [label=\""
                   << lat_index(oos[j]->lattice(), oos[i]->lattice()).get_num().get_str()
                   << "\"];\n";
        }
    os << "}\n";
    if (!in.dot_path.empty())
        write_output(in.dot_path, os.str());
    else
        std::cout << os.str();
    return 0;
}

int cmd_classify_prime(const InputOptions& in) {
    Resolved r = resolve(in, false);
    auto sing = singular_primes(r.R, r.OK);
    std::cout << "order index in O_K: "
              << lat_index(r.OK->lattice(), r.R->lattice()).get_num().get_str() << "\n";
    if (sing.empty()) {
        std::cout << "no singular primes (the order is maximal)\n";
        return 0;
    }
    for (const auto& m : sing) {
        SplittingType st = classify_splitting(r.R, m);
        std::cout << "ell=" << m.ell << " residue=" << m.residue_size
                  << " cm_type=" << cm_type(r.R, m) << " splitting=" << st.name()
                  << " bass=" << (is_bass_at(r.R, m) ? "yes" : "no") << "\n";
    }
    return 0;
}

GraphSpec make_spec(const InputOptions& in, Resolved& r, const std::string& chain_source) {
    GraphSpec spec;
    spec.R = r.R;
    spec.l = *r.l;
    spec.ladder = build_ladder(r.R, *r.l, r.OK);
    if (chain_source == "imquad") {
        spec.chain = imquad_class_data(spec.ladder);
    } else if (chain_source.rfind("file:", 0) == 0) {
        spec.chain = load_external_chain(chain_source.substr(5));
    } else {
        throw err("cli", "UsageError", "class data source must be imquad or file:PATH");
    }
    std::optional<Int> user_n;
    if (!in.n_override.empty()) user_n = int_from_string(in.n_override);
    IsogenyClassContext ctx = classify_isogeny_class(r.alg, user_n);
    spec.N = *ctx.orbit_count;
    spec.n_unverified = (ctx.kind == IsogenyClassContext::Kind::Other);
    if (in.dmin_override >= 0) {
        spec.d_min = static_cast<unsigned>(in.dmin_override);
    } else {
        if (!ctx.o_min)
            throw err("cli", "UsageError",
                      "--dmin is required when the class has no O_min rule");
        spec.d_min = compute_d_min(spec.ladder, ctx.o_min);
    }
    return spec;
}

int cmd_graph(const InputOptions& in, bool volcano_check) {
    Resolved r = resolve(in, true);
    std::vector<GraphSpec> specs;
    if (!in.all_ladders) {
        specs.push_back(make_spec(in, r, in.class_data));
    } else {
        // one spec per l-ladder in the overorder set, chain files comma listed
        std::vector<std::string> sources;
        std::stringstream ss(in.class_data);
        std::string part;
        while (std::getline(ss, part, ',')) sources.push_back(part);
        // deterministic ladder enumeration: locate every overorder
        std::vector<OrderPtr> bases;
        for (const auto& T : enumerate_overorders(r.R, r.OK)) {
            auto [lad, idx] = locate_in_ladder(r.R, *r.l, T, r.OK);
            bool known = false;
            for (const auto& b : bases) known |= (b->lattice() == lad.base->lattice());
            if (!known) bases.push_back(lad.base);
        }
        std::sort(bases.begin(), bases.end(),
                  [](const OrderPtr& a, const OrderPtr& b) { return a->compare(*b) < 0; });
        if (sources.size() != bases.size())
            throw err("cli", "UsageError",
                      "need one class-data source per ladder (" +
                          std::to_string(bases.size()) + " ladders)");
        for (size_t i = 0; i < bases.size(); ++i) {
            InputOptions local = in;
            Resolved rr = r;
            rr.R = bases[i];
            auto above = ideals_above_in(bases[i], *r.l);
            if (above.size() != 1)
                throw err("cli", "Internal", "ladder base without a unique prime over l");
            rr.l = above[0];
            specs.push_back(make_spec(local, rr, sources[i]));
        }
    }
    nlohmann::json summary = nlohmann::json::array();
    std::string dot_all, json_all;
    unsigned total_vertices = 0;
    for (size_t i = 0; i < specs.size(); ++i) {
        IsogenyGraph g = build_graph(specs[i]);
        total_vertices += g.vertices.size();
        nlohmann::json item;
        item["ladder"] = i;
        item["components"] = g.components;
        item["vertices"] = g.vertices.size();
        item["d"] = g.d;
        item["d_min"] = g.d_min;
        {
            std::map<unsigned, unsigned> per_level;
            for (const auto& vtx : g.vertices) per_level[vtx.level] += 1;
            nlohmann::json lv = nlohmann::json::array();
            for (unsigned lvl = 0; lvl <= g.d_min; ++lvl) lv.push_back(per_level[lvl]);
            item["level_sizes"] = lv;
        }
        item["strongly_connected"] = strong_connectivity_check(g).ok;
        if (g.missing_descending_at_bottom)
            item["warning"] = "bottom level has no descending edges; see find-base-order";
        if (specs[i].n_unverified) item["orbit_count_unverified"] = true;
        if (volcano_check) {
            VolcanoVerdict v = volcano_verdict(g, specs[i]);
            item["volcano"] = nlohmann::json::parse(verdict_to_json(v));
        }
        summary.push_back(item);
        dot_all += graph_to_dot(g);
        json_all += graph_to_json(g) + "\n";
    }
    std::cout << "ladders: " << specs.size() << ", total vertices: " << total_vertices
              << "\n";
    std::cout << summary.dump(2) << "\n";
    if (!in.dot_path.empty()) write_output(in.dot_path, dot_all);
    if (!in.json_path.empty()) write_output(in.json_path, json_all);
    return 0;
}

int cmd_fetch(const InputOptions& in) {
    FetchOptions fo;
    fo.offline = in.offline;
    WeilRecord rec = fetch(in.label, fo);
    nlohmann::json j;
    j["label"] = rec.label;
    j["g"] = rec.g;
    j["q"] = rec.q.get_str();
    j["p"] = rec.p.get_str();
    nlohmann::json h = nlohmann::json::array();
    for (const auto& c : rec.h) h.push_back(c.get_str());
    j["h"] = h;
    if (rec.is_ordinary) j["is_ordinary"] = *rec.is_ordinary;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic order ladders and isogeny volcano graphs"};
    app.set_config("--config", "", "key=value file with a [subcommand] section; flags win");
    app.require_subcommand(1);

    InputOptions in;
    auto add_common = [&](CLI::App* sub, bool with_prime) {
        sub->add_option("--label", in.label, "LMFDB isogeny class label");
        sub->add_option("--poly", in.poly_file, "polynomial JSON file");
        sub->add_flag("--offline", in.offline, "never touch the network");
        sub->add_option("--disc-factors", in.disc_factors,
                        "discriminant factorization hints p1^e1,p2^e2,...");
        sub->add_option("--order", in.order_spec,
                        "base order: Z[pi], Z[pi,q/pi], or auto");
        if (with_prime) {
            sub->add_option("--ell", in.ell, "rational prime under the maximal ideal");
            sub->add_option("--residue-size", in.residue_size,
                            "residue field size selector");
            sub->add_option("--prime-index", in.prime_index,
                            "index among matching ideals (deterministic order)");
        }
    };

    auto* ladder = app.add_subcommand("ladder", "build and print a multiplicator ladder");
    add_common(ladder, true);

    auto* oo = app.add_subcommand("overorders", "enumerate overorders, emit Hasse DOT");
    add_common(oo, false);
    oo->add_option("--dot", in.dot_path, "write the Hasse diagram here");

    auto* cls = app.add_subcommand("classify-prime",
                                   "classify the singular primes of the order");
    add_common(cls, false);

    auto* graph = app.add_subcommand("graph", "synthesize the isogeny graph");
    add_common(graph, true);
    graph->add_option("--class-data", in.class_data, "imquad or file:PATH (comma list with --all-ladders)");
    graph->add_option("--orbit-count", in.n_override, "override the orbit count N");
    graph->add_option("--dmin", in.dmin_override, "override d_min");
    graph->add_flag("--all-ladders", in.all_ladders, "aggregate all parallel ladders");
    graph->add_option("--dot", in.dot_path, "write DOT here");
    graph->add_option("--json", in.json_path, "write the graph JSON here");

    auto* volc = app.add_subcommand("volcano-check", "graph plus volcano verdicts");
    add_common(volc, true);
    volc->add_option("--class-data", in.class_data, "imquad or file:PATH");
    volc->add_option("--orbit-count", in.n_override, "override the orbit count N");
    volc->add_option("--dmin", in.dmin_override, "override d_min");
    volc->add_flag("--all-ladders", in.all_ladders, "aggregate all parallel ladders");
    volc->add_option("--dot", in.dot_path, "write DOT here");
    volc->add_option("--json", in.json_path, "write the graph JSON here");

    auto* fetch_cmd = app.add_subcommand("fetch", "resolve a label to its record");
    fetch_cmd->add_option("--label", in.label, "LMFDB isogeny class label")->required();
    fetch_cmd->add_flag("--offline", in.offline, "never touch the network");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("ladder")) return cmd_ladder(in);
        if (app.got_subcommand("overorders")) return cmd_overorders(in);
        if (app.got_subcommand("classify-prime")) return cmd_classify_prime(in);
        if (app.got_subcommand("graph")) return cmd_graph(in, false);
        if (app.got_subcommand("volcano-check")) return cmd_graph(in, true);
        if (app.got_subcommand("fetch")) return cmd_fetch(in);
    } catch (const Error& e) {
        nlohmann::json j;
        j["module"] = e.module();
        j["code"] = e.code();
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        if (e.module() == "cli" && e.code() == "UsageError") return 2;
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json j;
        j["module"] = "cli";
        j["code"] = "Internal";
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
    return 2;
}
