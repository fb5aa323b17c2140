#include "isovolc/classgroup.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isovolc/errors.hpp"

namespace isovolc {

// ---- FiniteAbelianGroup ----

Int FiniteAbelianGroup::order() const {
    Int o = 1;
    for (const auto& d : factors) o *= d;
    return o;
}

std::vector<Int> FiniteAbelianGroup::reduce(std::vector<Int> v) const {
    for (size_t i = 0; i < factors.size(); ++i) v[i] = fdiv_r(v[i], factors[i]);
    return v;
}

std::vector<Int> FiniteAbelianGroup::add(const std::vector<Int>& a,
                                         const std::vector<Int>& b) const {
    std::vector<Int> r(factors.size());
    for (size_t i = 0; i < factors.size(); ++i) r[i] = fdiv_r(a[i] + b[i], factors[i]);
    return r;
}

std::vector<Int> FiniteAbelianGroup::neg(const std::vector<Int>& a) const {
    std::vector<Int> r(factors.size());
    for (size_t i = 0; i < factors.size(); ++i) r[i] = fdiv_r(-a[i], factors[i]);
    return r;
}

std::vector<Int> FiniteAbelianGroup::smul(const Int& k, const std::vector<Int>& a) const {
    std::vector<Int> r(factors.size());
    for (size_t i = 0; i < factors.size(); ++i) r[i] = fdiv_r(k * a[i], factors[i]);
    return r;
}

bool FiniteAbelianGroup::is_zero(const std::vector<Int>& a) const {
    for (size_t i = 0; i < factors.size(); ++i)
        if (fdiv_r(a[i], factors[i]) != 0) return false;
    return true;
}

Int FiniteAbelianGroup::element_order(const std::vector<Int>& a) const {
    Int o = 1;
    for (size_t i = 0; i < factors.size(); ++i) {
        if (a[i] == 0) continue;
        Int d = factors[i];
        Int g = gcd(a[i], d);
        o = lcm(o, divexact(d, g));
    }
    return o;
}

namespace {

// relation lattice of a subgroup: rows of gens together with diag(factors)
MatZ subgroup_hnf(const FiniteAbelianGroup& G, const std::vector<std::vector<Int>>& gens) {
    size_t k = G.factors.size();
    MatZ m(gens.size() + k, k);
    for (size_t i = 0; i < gens.size(); ++i) m.set_row(i, gens[i]);
    for (size_t i = 0; i < k; ++i) m.at(gens.size() + i, i) = G.factors[i];
    return hnf(m);
}

}  // namespace

Int FiniteAbelianGroup::subgroup_order(const std::vector<std::vector<Int>>& gens) const {
    if (factors.empty()) return 1;
    MatZ h = subgroup_hnf(*this, gens);
    // |H| = |G| / [Z^k : H-lattice]
    Int covol = det_upper_triangular(h);
    return divexact(order(), covol);
}

bool FiniteAbelianGroup::in_subgroup(const std::vector<Int>& v,
                                     const std::vector<std::vector<Int>>& gens) const {
    if (factors.empty()) return true;
    MatZ h = subgroup_hnf(*this, gens);
    std::vector<Int> t = v;
    size_t k = factors.size();
    for (size_t i = k; i-- > 0;) {
        if (t[i] == 0) continue;
        if (!divisible(t[i], h.at(i, i))) return false;
        Int c = divexact(t[i], h.at(i, i));
        for (size_t j = 0; j <= i; ++j) t[j] -= c * h.at(i, j);
    }
    return true;
}

std::vector<std::vector<Int>> FiniteAbelianGroup::subgroup_elements(
    const std::vector<std::vector<Int>>& gens) const {
    std::vector<std::vector<Int>> out{zero()};
    std::map<std::vector<Int>, bool> seen{{zero(), true}};
    std::vector<std::vector<Int>> queue{zero()};
    while (!queue.empty()) {
        auto v = queue.back();
        queue.pop_back();
        for (const auto& g : gens) {
            auto w = add(v, reduce(g));
            if (!seen.count(w)) {
                seen[w] = true;
                out.push_back(w);
                queue.push_back(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<Int>> FiniteAbelianGroup::coset_reps(
    const std::vector<std::vector<Int>>& gens) const {
    // walk all elements in deterministic order, keep those not seen in any
    // earlier coset
    std::vector<std::vector<Int>> reps;
    auto sub = subgroup_elements(gens);
    std::map<std::vector<Int>, bool> covered;
    for (const auto& v : all_elements()) {
        if (covered.count(v)) continue;
        reps.push_back(v);
        for (const auto& s : sub) covered[add(v, s)] = true;
    }
    return reps;
}

std::vector<std::vector<Int>> FiniteAbelianGroup::all_elements() const {
    std::vector<std::vector<Int>> out;
    std::vector<Int> v = zero();
    for (;;) {
        out.push_back(v);
        size_t i = 0;
        for (; i < factors.size(); ++i) {
            v[i] += 1;
            if (v[i] < factors[i]) break;
            v[i] = 0;
        }
        if (i == factors.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- ClassChainData ----

std::vector<Int> ClassChainData::apply_surjection(unsigned from_level,
                                                  const std::vector<Int>& v) const {
    const MatZ& S = surjections[from_level - 1];
    const FiniteAbelianGroup& tgt = groups[from_level - 1];
    std::vector<Int> r(tgt.factors.size());
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = 0; j < r.size(); ++j) r[j] += v[i] * S.at(i, j);
    return tgt.reduce(std::move(r));
}

std::vector<Int> ClassChainData::to_surface(unsigned level, const std::vector<Int>& v) const {
    std::vector<Int> cur = v;
    for (unsigned i = level; i >= 1; --i) cur = apply_surjection(i, cur);
    return cur;
}

// ---- ratio formulas ----

Rat ratio_min_overorder(const OrderPtr& R, const MaximalIdeal& l, const OrderPtr& T,
                        const SplittingType& st, const Int& unit_index) {
    Rat base(lat_index(T->lattice(), R->lattice()));
    base /= Rat(unit_index);
    Rat ql(l.residue_size);
    switch (st.kind) {
        case SplittingType::Kind::Inert: {
            // (1 - q^-f) / (1 - q^-1)  =  (q^f - 1) / (q^{f-1} (q - 1))
            Rat num = Rat(pow_int(l.residue_size, st.inert_degree) - 1);
            Rat den = Rat(pow_int(l.residue_size, st.inert_degree - 1) * (l.residue_size - 1));
            base *= num / den;
            break;
        }
        case SplittingType::Kind::Split:
            base *= (ql - 1) / ql;
            break;
        default:
            break;  // ramified or singular: factor 1
    }
    mpq_class r = base;
    r.canonicalize();
    return r;
}

std::vector<Rat> ladder_ratios(const MultiplicatorLadder& ladder,
                               const std::vector<Int>& unit_indices) {
    unsigned d = ladder.d();
    if (unit_indices.size() != d)
        throw err("classgroup", "BadUnitIndices", "need one unit index per ladder step");
    std::vector<Rat> out;
    Rat ql(ladder.base_prime.residue_size);
    for (unsigned i = 1; i <= d; ++i) {
        Rat r;
        if (i == 1) {
            if (!ladder.top_splitting || ladder.top_splitting->delta() == 2)
                throw err("classgroup", "NotBass", "no delta for the surface step");
            r = (ql - ladder.top_splitting->delta()) / Rat(unit_indices[0]);
        } else {
            r = ql / Rat(unit_indices[i - 1]);
        }
        r.canonicalize();
        out.push_back(r);
    }
    return out;
}

// ---- binary quadratic forms ----

bool BQForm::operator<(const BQForm& o) const {
    int r = cmp(a, o.a);
    if (r) return r < 0;
    r = cmp(b, o.b);
    if (r) return r < 0;
    return cmp(c, o.c) < 0;
}

BQForm form_reduce(BQForm f) {
    if (f.disc() >= 0) throw err("classgroup", "NotImaginaryQuadratic", "disc >= 0");
    for (;;) {
        // normalize b into (-a, a]
        if (f.b > f.a || f.b <= -f.a) {
            Int r = fdiv_r(f.b + f.a, 2 * f.a);  // b + a mod 2a in [0, 2a)
            Int bnew = r - f.a;                  // in [-a, a)
            if (bnew == -f.a) bnew = f.a;
            Int k = divexact(f.b - bnew, 2 * f.a);
            // c' = c - k b + k^2 a  (translation x -> x - k y)
            f.c = f.c - k * f.b + k * k * f.a;
            f.b = bnew;
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        break;
    }
    if ((f.a == f.c || f.a == abs(f.b)) && f.b < 0) f.b = -f.b;
    return f;
}

BQForm form_identity(const Int& D) {
    Int b = fdiv_r(D, 2);
    BQForm f{1, b, divexact(b * b - D, 4)};
    return form_reduce(f);
}

BQForm form_inverse(const BQForm& f) { return form_reduce(BQForm{f.a, -f.b, f.c}); }

namespace {

Int form_eval(const BQForm& f, const Int& x, const Int& y) {
    return f.a * x * x + f.b * x * y + f.c * y * y;
}

// transform f by an SL2 matrix [[x, z], [y, w]]
BQForm form_transform(const BQForm& f, const Int& x, const Int& y, const Int& z, const Int& w) {
    BQForm g;
    g.a = form_eval(f, x, y);
    g.c = form_eval(f, z, w);
    g.b = 2 * (f.a * x * z + f.c * y * w) + f.b * (x * w + y * z);
    return g;
}

}  // namespace

BQForm form_compose(const BQForm& f0, const BQForm& g0) {
    if (f0.disc() != g0.disc())
        throw err("classgroup", "MismatchedDiscriminant", "composing forms of different disc");
    Int D = f0.disc();
    BQForm f = f0, g = g0;
    // make the leading coefficients coprime by transforming g
    if (gcd(f.a, g.a) != 1) {
        bool done = false;
        for (Int y = 0; y < 64 && !done; ++y) {
            for (Int x = -64; x <= 64 && !done; ++x) {
                if (gcd(x, y) != 1) continue;
                Int v = form_eval(g, x, y);
                if (v == 0) continue;
                if (gcd(v, f.a) == 1) {
                    // complete (x, y) to SL2: x w - y z = 1
                    Int gg, z0, w0;
                    mpz_gcdext(gg.get_mpz_t(), w0.get_mpz_t(), z0.get_mpz_t(),
                               x.get_mpz_t(), y.get_mpz_t());
                    // x*w0 + y*z0 = 1, so take w = w0, z = -z0
                    g = form_transform(g, x, y, -z0, w0);
                    done = true;
                }
            }
        }
        if (!done) throw err("classgroup", "Internal", "no coprime representative found");
    }
    // concordant B: B = b1 mod 2a1, B = b2 mod 2a2
    Int a1 = f.a, b1 = f.b, a2 = g.a, b2 = g.b;
    // solve b1 + 2 a1 k = b2 mod 2 a2  =>  k = (b2 - b1)/2 * a1^{-1} mod a2
    Int diff = divexact(b2 - b1, 2);
    Int k = fdiv_r(diff * invmod(fdiv_r(a1, a2), a2), a2);
    Int B = b1 + 2 * a1 * k;
    Int A = a1 * a2;
    Int C = divexact(B * B - D, 4 * A);
    return form_reduce(BQForm{A, B, C});
}

std::vector<BQForm> reduced_forms(const Int& D) {
    if (D >= 0 || fdiv_r(D, 4) > 1)
        throw err("classgroup", "NotImaginaryQuadratic", "bad discriminant");
    std::vector<BQForm> out;
    Int amax;
    mpz_sqrt(amax.get_mpz_t(), Int(abs(D) / 3).get_mpz_t());
    for (Int a = 1; a <= amax; ++a) {
        for (Int b = -a + 1; b <= a; ++b) {
            if (fdiv_r(b - D, 2) != 0) continue;
            Int num = b * b - D;
            if (!divisible(num, 4 * a)) continue;
            Int c = divexact(num, 4 * a);
            if (c < a) continue;
            if (gcd(gcd(a, b), c) != 1) continue;
            if ((abs(b) == a || a == c) && b < 0) continue;
            out.push_back(BQForm{a, b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- quadratic order helpers ----

Int order_disc_quadratic(const OrderPtr& O) {
    if (O->degree() != 2)
        throw err("classgroup", "NotImaginaryQuadratic", "order of degree != 2");
    return O->discriminant();
}

unsigned imquad_unit_count(const Int& D) {
    if (D == -3) return 6;
    if (D == -4) return 4;
    return 2;
}

namespace {

// sqrt(D_O) as an algebra element: positive rational multiple of 2 pi + h1
AlgebraElement sqrt_disc_elem(const OrderPtr& O) {
    AlgebraPtr alg = O->algebra();
    Int dh = alg->discriminant();
    Int DO = order_disc_quadratic(O);
    auto t = sqrt_exact(Rat(DO) / Rat(dh));
    if (!t) throw err("classgroup", "Internal", "disc ratio is not a square");
    const IntPoly& h = alg->h();
    // sqrt(disc h) = 2 pi + h1
    AlgebraElement s = elem_add(elem_mul_int(elem_pi(alg), 2), elem_int(alg, h[1]));
    AlgebraElement r = elem_mul(s, elem_from_coords(alg, {t->get_num(), Int(0)}, t->get_den()));
    return r;
}

Rat elem_norm_quadratic(const AlgebraElement& x) { return elem_norm(x); }

}  // namespace

BQForm form_of_ideal(const ZLattice& I, const OrderPtr& O) {
    if (O->degree() != 2) throw err("classgroup", "NotImaginaryQuadratic", "degree != 2");
    AlgebraElement alpha = I.element_at(0), beta = I.element_at(1);
    Rat nI = lat_index(O->lattice(), I);
    Rat na = elem_norm_quadratic(alpha), nb = elem_norm_quadratic(beta);
    Rat nab = elem_norm_quadratic(elem_add(alpha, beta));
    Rat A = na / nI, B = (nab - na - nb) / nI, C = nb / nI;
    A.canonicalize();
    B.canonicalize();
    C.canonicalize();
    if (A.get_den() != 1 || B.get_den() != 1 || C.get_den() != 1)
        throw err("classgroup", "NotProperIdeal", "norm form is not integral");
    BQForm f{A.get_num(), B.get_num(), C.get_num()};
    if (f.a < 0) {
        f.a = -f.a;
        f.b = -f.b;
        f.c = -f.c;
    }
    if (f.disc() != order_disc_quadratic(O))
        throw err("classgroup", "NotProperIdeal", "form disc mismatch");
    return form_reduce(f);
}

ZLattice ideal_of_form(const BQForm& f, const OrderPtr& O) {
    AlgebraPtr alg = O->algebra();
    AlgebraElement sq = sqrt_disc_elem(O);
    // I = a Z + (-b + sqrt(D))/2 Z
    AlgebraElement gen2 = elem_add(elem_int(alg, -f.b), sq);
    gen2 = elem_mul(gen2, elem_from_coords(alg, {Int(1), Int(0)}, 2));
    AlgebraElement gen1 = elem_int(alg, f.a);
    ZLattice I = ZLattice::from_generators(alg, {gen1, gen2});
    return I;
}

bool imquad_ideal_principal_bruteforce(const ZLattice& I, const OrderPtr& O) {
    // principal iff some x in I has N(x) = N(I); positive definite search
    Rat nI = lat_index(O->lattice(), I);
    AlgebraElement a0 = I.element_at(0), a1 = I.element_at(1);
    // bound coefficients via the norm form of the basis
    for (Int u = -64; u <= 64; ++u)
        for (Int v = -64; v <= 64; ++v) {
            if (u == 0 && v == 0) continue;
            AlgebraElement x = elem_add(elem_mul_int(a0, u), elem_mul_int(a1, v));
            if (elem_norm(x) == nI) return true;
        }
    return false;
}

// ---- group structure from forms ----

namespace {

struct FormGroup {
    Int D;
    FiniteAbelianGroup G;
    std::map<BQForm, std::vector<Int>> dlog;  // reduced form -> exponent vector
};

FormGroup form_group(const Int& D) {
    std::vector<BQForm> forms = reduced_forms(D);
    BQForm id = form_identity(D);
    // polycyclic enumeration: grow the known subgroup one generator at a time
    std::map<BQForm, std::vector<Int>> pc;  // form -> exponents over pc gens
    pc[id] = {};
    std::vector<BQForm> gens;
    std::vector<std::vector<Int>> relations;  // g_i^{k_i} = prod_{j<i} g_j^{e_j}
    for (const auto& g : forms) {
        if (pc.count(g)) continue;
        // find smallest k with g^k known
        BQForm p = g;
        Int k = 1;
        while (!pc.count(p)) {
            p = form_compose(p, g);
            k += 1;
        }
        std::vector<Int> rel = pc[p];  // over previous gens
        gens.push_back(g);
        // extend all stored vectors to the new generator count
        for (auto& [f, v] : pc) v.resize(gens.size());
        rel.resize(gens.size());
        relations.push_back([&] {
            std::vector<Int> r(gens.size());
            r[gens.size() - 1] = k;
            for (size_t j = 0; j + 1 < gens.size(); ++j) r[j] = -rel[j];
            return r;
        }());
        // close the dlog table under the new generator
        std::map<BQForm, std::vector<Int>> grown = pc;
        BQForm gp = id;
        for (Int e = 1; e < k; ++e) {
            gp = form_compose(gp, g);
            for (const auto& [f, v] : pc) {
                BQForm nf = form_compose(f, gp);
                std::vector<Int> nv = v;
                nv[gens.size() - 1] = e;
                grown[nf] = nv;
            }
        }
        pc = grown;
    }
    // invariant factors from the relation lattice
    size_t m = gens.size();
    FormGroup out;
    out.D = D;
    if (m == 0) {
        out.G.factors = {};
        out.dlog[id] = {};
        return out;
    }
    MatZ R(m, m);
    for (size_t i = 0; i < m; ++i) {
        std::vector<Int> row = relations[i];
        row.resize(m);
        R.set_row(i, row);
    }
    MatZ U, V;
    std::vector<Int> d = snf_with_transform(R, U, V);
    // keep nontrivial factors with their coordinate positions
    std::vector<size_t> keep;
    for (size_t i = 0; i < m; ++i)
        if (d[i] != 1) keep.push_back(i);
    out.G.factors.clear();
    for (size_t i : keep) out.G.factors.push_back(d[i]);
    // dlog in SNF coordinates: x -> (x V) mod d restricted to kept positions
    for (const auto& [f, v] : pc) {
        std::vector<Int> w = row_times_mat(v, V);
        std::vector<Int> out_v;
        for (size_t idx = 0; idx < keep.size(); ++idx)
            out_v.push_back(fdiv_r(w[keep[idx]], d[keep[idx]]));
        out.dlog[f] = out_v;
    }
    return out;
}

}  // namespace

ClassChainData imquad_class_data(const MultiplicatorLadder& ladder) {
    const AlgebraPtr& alg = ladder.base->algebra();
    if (alg->degree() != 2 || alg->discriminant() >= 0)
        throw err("classgroup", "NotImaginaryQuadratic",
                  "imquad backend needs an imaginary quadratic algebra");
    unsigned d = ladder.d();
    ClassChainData chain;
    std::vector<FormGroup> fgs;
    std::vector<Int> discs;
    for (unsigned i = 0; i <= d; ++i) {
        Int Di = order_disc_quadratic(ladder.rung(i));
        discs.push_back(Di);
        fgs.push_back(form_group(Di));
        chain.groups.push_back(fgs.back().G);
    }
    // surjections level i -> i-1 by ideal extension of the SNF generators
    for (unsigned i = 1; i <= d; ++i) {
        const FiniteAbelianGroup& src = chain.groups[i];
        const FiniteAbelianGroup& tgt = chain.groups[i - 1];
        MatZ S(src.rank(), tgt.rank());
        // generator j of src: find a reduced form with dlog = e_j
        for (size_t j = 0; j < src.rank(); ++j) {
            std::vector<Int> ej(src.rank());
            ej[j] = 1;
            const BQForm* genform = nullptr;
            for (const auto& [f, v] : fgs[i].dlog)
                if (v == ej) {
                    genform = &f;
                    break;
                }
            if (!genform) throw err("classgroup", "Internal", "SNF generator not found");
            ZLattice I = ideal_of_form(*genform, ladder.rung(i));
            ZLattice Iext = lat_product(I, ladder.rung(i - 1)->lattice());
            BQForm img = form_of_ideal(Iext, ladder.rung(i - 1));
            const auto& w = fgs[i - 1].dlog.at(img);
            for (size_t t = 0; t < tgt.rank(); ++t) S.at(j, t) = w[t];
        }
        chain.surjections.push_back(S);
    }
    // distinguished classes at the surface
    auto top_above = ideals_above_in(ladder.rung(0), ladder.base_prime);
    for (const auto& P : top_above) {
        BQForm f = form_of_ideal(P.lat, ladder.rung(0));
        chain.primes_above_l.push_back(fgs[0].dlog.at(f));
    }
    // l extension classes where invertible (levels 0..d-1; level d only when regular)
    for (unsigned i = 0; i <= d; ++i) {
        if (i == d && ladder.base_prime.singular) {
            chain.l_extension_class.push_back(std::nullopt);
            continue;
        }
        ZLattice ext = lat_product(ladder.base_prime.lat, ladder.rung(i)->lattice());
        BQForm f = form_of_ideal(ext, ladder.rung(i));
        chain.l_extension_class.push_back(fgs[i].dlog.at(f));
    }
    // unit indices from torsion counts
    for (unsigned i = 1; i <= d; ++i) {
        unsigned wi = imquad_unit_count(discs[i]);
        unsigned wim1 = imquad_unit_count(discs[i - 1]);
        chain.unit_indices.push_back(Int(wim1 / wi));
    }
    chain.delta_l = ladder.top_splitting ? ladder.top_splitting->delta() : 0;
    validate_chain(chain);
    return chain;
}

// ---- external chain data ----

namespace {

Int json_int(const nlohmann::json& j) {
    if (j.is_string()) return int_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Int(static_cast<long>(j.get<long long>()));
    throw err("classgroup", "SchemaError", "expected integer or decimal string");
}

std::vector<Int> json_vec(const nlohmann::json& j) {
    std::vector<Int> v;
    for (const auto& e : j) v.push_back(json_int(e));
    return v;
}

}  // namespace

ClassChainData parse_chain_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw err("classgroup", "SchemaError", std::string("bad JSON: ") + e.what());
    }
    try {
        if (!j.contains("schema") || j["schema"].get<int>() != 1)
            throw err("classgroup", "SchemaError", "missing or unsupported schema version");
        ClassChainData c;
        for (const auto& lvl : j.at("levels")) {
            FiniteAbelianGroup g;
            g.factors = json_vec(lvl.at("invariant_factors"));
            for (const auto& f : g.factors)
                if (f < 1) throw err("classgroup", "SchemaError", "invariant factor < 1");
            for (size_t i = 0; i + 1 < g.factors.size(); ++i)
                if (!divisible(g.factors[i + 1], g.factors[i]))
                    throw err("classgroup", "SchemaError", "invariant factors do not divide");
            // normalize away trivial factors
            std::vector<Int> nf;
            for (const auto& f : g.factors)
                if (f != 1) nf.push_back(f);
            g.factors = nf;
            c.groups.push_back(g);
            if (lvl.contains("l_extension_class") && !lvl["l_extension_class"].is_null())
                c.l_extension_class.push_back(json_vec(lvl["l_extension_class"]));
            else
                c.l_extension_class.push_back(std::nullopt);
        }
        for (const auto& s : j.at("surjections")) {
            size_t lvl = c.surjections.size();
            const auto& src = c.groups.at(lvl + 1);
            const auto& tgt = c.groups.at(lvl);
            MatZ m(src.rank(), tgt.rank());
            if (s.size() != src.rank())
                throw err("classgroup", "SchemaError", "surjection row count mismatch");
            for (size_t i = 0; i < src.rank(); ++i) {
                auto row = json_vec(s[i]);
                if (row.size() != tgt.rank())
                    throw err("classgroup", "SchemaError", "surjection column count mismatch");
                m.set_row(i, row);
            }
            c.surjections.push_back(m);
        }
        for (const auto& p : j.at("primes_above_l")) c.primes_above_l.push_back(json_vec(p));
        c.unit_indices = json_vec(j.at("unit_indices"));
        c.delta_l = j.at("delta_l").get<int>();
        validate_chain(c);
        return c;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw err("classgroup", "SchemaError", e.what());
    }
}

ClassChainData load_external_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw err("classgroup", "SchemaError", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_chain_json(ss.str());
}

void validate_chain(const ClassChainData& chain) {
    unsigned d = chain.d();
    if (chain.surjections.size() != d)
        throw err("classgroup", "SchemaError", "need d surjections for d+1 levels");
    if (chain.unit_indices.size() != d)
        throw err("classgroup", "SchemaError", "need d unit indices");
    if (chain.l_extension_class.size() != chain.groups.size())
        throw err("classgroup", "SchemaError", "need one l-extension entry per level");
    if (chain.delta_l < -1 || chain.delta_l > 1)
        throw err("classgroup", "SchemaError", "delta_l out of range");
    size_t expected_primes = chain.delta_l == 1 ? 2 : 1;
    if (chain.primes_above_l.size() != expected_primes)
        throw err("classgroup", "SchemaError", "prime count does not match delta_l");
    for (const auto& p : chain.primes_above_l)
        if (p.size() != chain.groups[0].rank())
            throw err("classgroup", "SchemaError", "prime class has wrong rank");
    // surjectivity of each connecting map
    for (unsigned i = 1; i <= d; ++i) {
        const auto& tgt = chain.groups[i - 1];
        std::vector<std::vector<Int>> rows;
        for (size_t r = 0; r < chain.groups[i].rank(); ++r)
            rows.push_back(chain.surjections[i - 1].row(r));
        if (tgt.subgroup_order(rows) != tgt.order())
            throw err("classgroup", "SchemaError",
                      "surjection at level " + std::to_string(i) + " is not onto");
    }
    // l-extension classes commute with the surjections
    for (unsigned i = 1; i <= d; ++i) {
        if (!chain.l_extension_class[i] || !chain.l_extension_class[i - 1]) continue;
        auto img = chain.apply_surjection(i, *chain.l_extension_class[i]);
        if (img != chain.groups[i - 1].reduce(*chain.l_extension_class[i - 1]))
            throw err("classgroup", "SchemaError",
                      "l-extension class does not map to the one below at level " +
                          std::to_string(i));
    }
    // level-0 extension class is determined by the prime classes:
    // l O_0 = L (inert or d = 0), L^2 (ramified), or L_1 L_2 (split)
    if (chain.l_extension_class[0]) {
        const auto& G0 = chain.groups[0];
        std::vector<Int> s;
        if (chain.delta_l == 0 && d > 0) {
            s = G0.smul(2, G0.reduce(chain.primes_above_l[0]));
        } else {
            s = G0.zero();
            for (const auto& p : chain.primes_above_l) s = G0.add(s, G0.reduce(p));
        }
        if (s != G0.reduce(*chain.l_extension_class[0]))
            throw err("classgroup", "SchemaError",
                      "surface l-extension class is not the product of the primes");
    }
}

void validate_chain_against_ladder(const ClassChainData& chain,
                                   const MultiplicatorLadder& ladder) {
    if (chain.d() != ladder.d())
        throw err("classgroup", "InconsistentRatios", "chain and ladder lengths differ");
    if (ladder.d() >= 1) {
        if (!ladder.top_splitting || ladder.top_splitting->delta() == 2)
            throw err("classgroup", "InconsistentRatios", "ladder has a singular top");
        if (chain.delta_l != ladder.top_splitting->delta())
            throw err("classgroup", "InconsistentRatios", "delta_l does not match the ladder");
    }
    auto ratios = ladder_ratios(ladder, chain.unit_indices);
    for (unsigned i = 1; i <= chain.d(); ++i) {
        Rat got(chain.groups[i].order(), chain.groups[i - 1].order());
        got.canonicalize();
        if (got != ratios[i - 1])
            throw err("classgroup", "InconsistentRatios",
                      "class-number ratio at level " + std::to_string(i) +
                          " does not match the ladder formula");
    }
}

}  // namespace isovolc
