#include "isovolc/orders.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "isovolc/errors.hpp"

namespace isovolc {

namespace {

// registry of canonical orders; last-writer-wins idempotent entries
std::mutex g_registry_mutex;
std::map<std::string, std::weak_ptr<const Order>> g_registry;

}  // namespace

OrderPtr make_order(ZLattice lat) {
    std::string key = lat.key();
    {
        std::lock_guard<std::mutex> lk(g_registry_mutex);
        auto it = g_registry.find(key);
        if (it != g_registry.end()) {
            if (auto sp = it->second.lock()) return sp;
        }
    }
    if (!lat.contains_one())
        throw err("orders", "NotAnOrder", "lattice does not contain 1");
    if (lat_product(lat, lat) != lat)
        throw err("orders", "NotAnOrder", "lattice is not multiplicatively closed");
    auto p = std::shared_ptr<Order>(new Order());
    p->lat_ = std::move(lat);
    {
        std::lock_guard<std::mutex> lk(g_registry_mutex);
        g_registry[key] = p;
    }
    return p;
}

const std::vector<MatZ>& Order::structure() const {
    std::call_once(structure_once_, [this] {
        size_t n = degree();
        std::vector<MatZ> st;
        st.reserve(n);
        // coords of b_i * b_j in the order basis (must be integral)
        for (size_t i = 0; i < n; ++i) {
            MatZ m(n, n);
            AlgebraElement bi = lat_.element_at(i);
            for (size_t j = 0; j < n; ++j) {
                AlgebraElement prod = elem_mul(bi, lat_.element_at(j));
                // solve prod = c * basis/den
                std::vector<Int> t(n);
                for (size_t k = 0; k < n; ++k) {
                    Int v = prod.num[k] * lat_.denominator();
                    if (!divisible(v, prod.den))
                        throw err("orders", "Internal", "structure constants not integral");
                    t[k] = divexact(v, prod.den);
                }
                for (size_t k = 0; k < n; ++k) {
                    Int c = divexact(t[k], lat_.basis().at(k, k));
                    m.at(j, k) = c;
                    for (size_t x = k; x < n; ++x) t[x] -= c * lat_.basis().at(k, x);
                }
            }
            st.push_back(std::move(m));
        }
        structure_ = std::move(st);
    });
    return structure_;
}

Int Order::discriminant() const {
    size_t n = degree();
    MatZ g(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            Rat t = elem_trace(elem_mul(lat_.element_at(i), lat_.element_at(j)));
            if (t.get_den() != 1)
                throw err("orders", "Internal", "non-integral trace on an order");
            g.at(i, j) = t.get_num();
            g.at(j, i) = t.get_num();
        }
    return det(g);
}

OrderPtr order_from_generators(AlgebraPtr alg, const std::vector<AlgebraElement>& gens) {
    for (const auto& g : gens)
        if (!elem_is_integral(g))
            throw err("orders", "NotIntegral", "generator is not integral");
    std::vector<AlgebraElement> basis{elem_one(alg)};
    for (const auto& g : gens) basis.push_back(g);
    // saturate under products until the lattice stabilizes
    size_t n = alg->degree();
    MatZ rows(basis.size(), n);
    Int den = 1;
    for (const auto& b : basis) den = lcm(den, b.den);
    for (size_t i = 0; i < basis.size(); ++i) {
        Int f = divexact(den, basis[i].den);
        std::vector<Int> r(n);
        for (size_t j = 0; j < n; ++j) r[j] = basis[i].num[j] * f;
        rows.set_row(i, r);
    }
    MatZ h = hnf(rows);
    if (h.rows() != n) {
        // not yet full rank: grow with products of generators before giving up
        std::vector<AlgebraElement> pool = basis;
        for (size_t round = 0; round < n && h.rows() != n; ++round) {
            std::vector<AlgebraElement> next = pool;
            for (const auto& x : pool)
                for (const auto& g : gens) next.push_back(elem_mul(x, g));
            pool = next;
            den = 1;
            for (const auto& b : pool) den = lcm(den, b.den);
            MatZ rows2(pool.size(), n);
            for (size_t i = 0; i < pool.size(); ++i) {
                Int f = divexact(den, pool[i].den);
                std::vector<Int> r(n);
                for (size_t j = 0; j < n; ++j) r[j] = pool[i].num[j] * f;
                rows2.set_row(i, r);
            }
            h = hnf(rows2);
        }
        if (h.rows() != n)
            throw err("orders", "RankDeficient", "generators do not span the algebra");
    }
    ZLattice L = ZLattice::from_rows(alg, h, den);
    for (;;) {
        ZLattice next = lat_sum(L, lat_product(L, L));
        if (next == L) break;
        L = next;
    }
    return make_order(L);
}

OrderPtr order_zpi(AlgebraPtr alg) {
    return order_from_generators(alg, {elem_pi(alg)});
}

OrderPtr order_zpi_qpi(AlgebraPtr alg) {
    return order_from_generators(alg, {elem_pi(alg), elem_q_over_pi(alg)});
}

// ---- finite F_ell algebra machinery for T/ell T ----

namespace {

// F_ell row reduction; returns pivot columns, matrix reduced in place
std::vector<size_t> fl_rref(MatZ& m, const Int& ell) {
    size_t rows = m.rows(), cols = m.cols();
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = rows;
        for (size_t i = r; i < rows; ++i)
            if (fdiv_r(m.at(i, c), ell) != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        for (size_t j = 0; j < cols; ++j) std::swap(m.at(r, j), m.at(piv, j));
        Int inv = invmod(fdiv_r(m.at(r, c), ell), ell);
        for (size_t j = 0; j < cols; ++j) m.at(r, j) = fdiv_r(m.at(r, j) * inv, ell);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            Int f = fdiv_r(m.at(i, c), ell);
            if (f == 0) continue;
            for (size_t j = 0; j < cols; ++j)
                m.at(i, j) = fdiv_r(m.at(i, j) - f * m.at(r, j), ell);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

// kernel of v -> v * m over F_ell, rows = basis
MatZ fl_left_kernel(const MatZ& m, const Int& ell) {
    MatZ mt = m.transpose();
    size_t n = m.rows();
    // solve mt * v^T = 0: row reduce mt, free variables give kernel
    MatZ red = mt;
    std::vector<size_t> piv = fl_rref(red, ell);
    std::vector<bool> is_pivot(n, false);
    for (size_t c : piv) is_pivot[c] = true;
    MatZ ker(n - piv.size(), n);
    size_t kr = 0;
    for (size_t fc = 0; fc < n; ++fc) {
        if (is_pivot[fc]) continue;
        ker.at(kr, fc) = 1;
        for (size_t i = 0; i < piv.size(); ++i)
            ker.at(kr, piv[i]) = fdiv_r(-red.at(i, fc), ell);
        ++kr;
    }
    return ker;
}

}  // namespace

std::vector<MaximalIdeal> maximal_ideals_above(const OrderPtr& T, const Int& ell) {
    if (!is_prime(ell)) throw err("orders", "NotPrime", "ell must be prime");
    size_t n = T->degree();
    const auto& st = T->structure();

    auto mulv = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
        std::vector<Int> r(n);
        for (size_t i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            for (size_t j = 0; j < n; ++j) {
                if (y[j] == 0) continue;
                Int f = fdiv_r(x[i] * y[j], ell);
                if (f == 0) continue;
                for (size_t k = 0; k < n; ++k) r[k] = fdiv_r(r[k] + f * st[i].at(j, k), ell);
            }
        }
        return r;
    };
    // coordinates of 1 in the order basis
    std::vector<Int> one_coords(n);
    {
        AlgebraElement one = elem_one(T->algebra());
        std::vector<Int> t(n);
        for (size_t k = 0; k < n; ++k) t[k] = one.num[k] * T->lattice().denominator();
        for (size_t k = 0; k < n; ++k) {
            Int c = divexact(t[k], T->lattice().basis().at(k, k));
            one_coords[k] = fdiv_r(c, ell);
            for (size_t x = k; x < n; ++x) t[x] -= c * T->lattice().basis().at(k, x);
        }
    }
    auto powv = [&](std::vector<Int> b, Int e) {
        std::vector<Int> r = one_coords;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mulv(r, b);
            b = mulv(b, b);
            e >>= 1;
        }
        return r;
    };

    // Frobenius matrix: row i = (b_i)^ell
    MatZ frob(n, n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Int> e(n);
        e[i] = 1;
        frob.set_row(i, powv(e, ell));
    }
    // nilradical = ker(F^k), ell^k >= n
    MatZ fk = frob;
    Int lk = ell;
    while (lk < Int(n)) {
        fk = fk * fk;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) fk.at(i, j) = fdiv_r(fk.at(i, j), ell);
        lk *= lk;
    }
    MatZ nil = fl_left_kernel(fk, ell);
    size_t s = nil.rows();

    // quotient B = A/N: extend nil rows with unit vectors to a basis
    MatZ chg(n, n);
    for (size_t i = 0; i < s; ++i) chg.set_row(i, nil.row(i));
    {
        MatZ red = nil;
        std::vector<size_t> piv = fl_rref(red, ell);
        std::vector<bool> is_pivot(n, false);
        for (size_t c : piv) is_pivot[c] = true;
        size_t r = s;
        for (size_t j = 0; j < n && r < n; ++j) {
            if (is_pivot[j]) continue;
            chg.at(r, j) = 1;
            ++r;
        }
    }
    // inverse of chg mod ell
    MatZ chg_inv(n, n);
    {
        MatZ aug = MatZ::hstack(chg, MatZ::identity(n));
        std::vector<size_t> piv = fl_rref(aug, ell);
        if (piv.size() != n) throw err("orders", "Internal", "basis extension failed");
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) chg_inv.at(i, j) = aug.at(i, n + j);
    }
    size_t bn = n - s;  // dim of B
    // project: coords in new basis = v * chg_inv; B coords = last bn entries
    auto project = [&](const std::vector<Int>& v) {
        std::vector<Int> w(bn);
        for (size_t j = 0; j < bn; ++j) {
            Int acc = 0;
            for (size_t k = 0; k < n; ++k) acc += v[k] * chg_inv.at(k, s + j);
            w[j] = fdiv_r(acc, ell);
        }
        return w;
    };
    auto lift = [&](const std::vector<Int>& w) {
        std::vector<Int> v(n);
        for (size_t k = 0; k < n; ++k) {
            Int acc = 0;
            for (size_t j = 0; j < bn; ++j) acc += w[j] * chg.at(s + j, k);
            v[k] = fdiv_r(acc, ell);
        }
        return v;
    };
    auto mulb = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
        return project(mulv(lift(x), lift(y)));
    };
    std::vector<Int> one_b = project(one_coords);

    // Frobenius on B and its fixed algebra E
    MatZ frob_b(bn, bn);
    for (size_t i = 0; i < bn; ++i) {
        std::vector<Int> e(bn);
        e[i] = 1;
        frob_b.set_row(i, project(powv(lift(e), ell)));
    }
    MatZ fmi = frob_b;
    for (size_t i = 0; i < bn; ++i) fmi.at(i, i) = fdiv_r(fmi.at(i, i) - 1, ell);
    MatZ fixed = fl_left_kernel(fmi, ell);  // rows span E; dim = #max ideals

    // split B into local blocks via idempotents
    struct Block {
        std::vector<Int> idem;  // idempotent in B coords
    };
    std::vector<Block> blocks{Block{one_b}};
    auto min_poly_roots_split = [&](const std::vector<Int>& c, const Block& blk,
                                    std::vector<Int>& mp) {
        // minimal polynomial of c inside the block algebra (unit blk.idem)
        std::vector<std::vector<Int>> pows{blk.idem};
        for (;;) {
            pows.push_back(mulb(pows.back(), c));
            MatZ m(pows.size(), bn);
            for (size_t i = 0; i < pows.size(); ++i) m.set_row(i, pows[i]);
            MatZ red = m;
            std::vector<size_t> piv = fl_rref(red, ell);
            if (piv.size() < pows.size()) {
                // first dependence is one dimensional
                MatZ ker = fl_left_kernel(m, ell);
                std::vector<Int> rel = ker.row(0);
                // normalize so top coefficient is 1
                size_t top = rel.size();
                while (top > 0 && fdiv_r(rel[top - 1], ell) == 0) --top;
                Int inv = invmod(fdiv_r(rel[top - 1], ell), ell);
                mp.assign(rel.begin(), rel.begin() + top);
                for (auto& v : mp) v = fdiv_r(v * inv, ell);
                return;
            }
        }
    };

    for (size_t g = 0; g < fixed.rows(); ++g) {
        std::vector<Int> gen(fixed.row(g));
        std::vector<Block> next;
        for (const auto& blk : blocks) {
            std::vector<Int> c = mulb(gen, blk.idem);
            std::vector<Int> mp;
            min_poly_roots_split(c, blk, mp);
            FlPoly fp = fl_make(ell, mp);
            std::vector<Int> roots = fl_roots_of_split(fp);
            if (roots.size() <= 1) {
                next.push_back(blk);
                continue;
            }
            for (const Int& lam : roots) {
                // e_lam = blk.idem * prod_{mu != lam} (c - mu*idem)/(lam - mu)
                std::vector<Int> e = blk.idem;
                for (const Int& mu : roots) {
                    if (mu == lam) continue;
                    std::vector<Int> t(bn);
                    for (size_t k = 0; k < bn; ++k)
                        t[k] = fdiv_r(c[k] - mu * blk.idem[k], ell);
                    Int inv = invmod(fdiv_r(lam - mu, ell), ell);
                    for (size_t k = 0; k < bn; ++k) t[k] = fdiv_r(t[k] * inv, ell);
                    e = mulb(e, t);
                }
                next.push_back(Block{e});
            }
        }
        blocks = next;
    }

    // block dimensions and maximal ideal lattices
    std::vector<MaximalIdeal> out;
    for (const auto& blk : blocks) {
        // mult-by-idempotent matrix on B; block dim = its rank
        MatZ mult(bn, bn);
        for (size_t i = 0; i < bn; ++i) {
            std::vector<Int> e(bn);
            e[i] = 1;
            mult.set_row(i, mulb(e, blk.idem));
        }
        MatZ red = mult;
        size_t f = fl_rref(red, ell).size();
        // m = { x in A : project(x) * idem = 0 }
        MatZ cond(n, bn);
        for (size_t i = 0; i < n; ++i) {
            std::vector<Int> e(n);
            e[i] = 1;
            cond.set_row(i, mulb(project(e), blk.idem));
        }
        MatZ ker = fl_left_kernel(cond, ell);
        // lattice: ell*T + lifts of kernel vectors (kernel coords are in the
        // order basis)
        MatZ rows(n + ker.rows(), n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) rows.at(i, j) = ell * T->lattice().basis().at(i, j);
        for (size_t i = 0; i < ker.rows(); ++i)
            rows.set_row(n + i, row_times_mat(ker.row(i), T->lattice().basis()));
        ZLattice mlat = ZLattice::from_rows(T->algebra(), rows, T->lattice().denominator());
        MaximalIdeal m;
        m.lat = mlat;
        m.order = T;
        m.ell = ell;
        m.residue_size = pow_int(ell, static_cast<unsigned long>(f));
        m.singular = (multiplicator_ring(mlat)->lattice() != T->lattice());
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end(), [](const MaximalIdeal& a, const MaximalIdeal& b) {
        int c = cmp(a.residue_size, b.residue_size);
        if (c) return c < 0;
        return a.lat.compare(b.lat) < 0;
    });
    return out;
}

ZLattice radical_at(const OrderPtr& T, const Int& ell) {
    size_t n = T->degree();
    const auto& st = T->structure();
    auto mulv = [&](const std::vector<Int>& x, const std::vector<Int>& y) {
        std::vector<Int> r(n);
        for (size_t i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            for (size_t j = 0; j < n; ++j) {
                if (y[j] == 0) continue;
                Int f = fdiv_r(x[i] * y[j], ell);
                if (f == 0) continue;
                for (size_t k = 0; k < n; ++k) r[k] = fdiv_r(r[k] + f * st[i].at(j, k), ell);
            }
        }
        return r;
    };
    std::vector<Int> one_coords(n);
    {
        std::vector<Int> t(n);
        AlgebraElement one = elem_one(T->algebra());
        for (size_t k = 0; k < n; ++k) t[k] = one.num[k] * T->lattice().denominator();
        for (size_t k = 0; k < n; ++k) {
            Int c = divexact(t[k], T->lattice().basis().at(k, k));
            one_coords[k] = fdiv_r(c, ell);
            for (size_t x = k; x < n; ++x) t[x] -= c * T->lattice().basis().at(k, x);
        }
    }
    auto powv = [&](std::vector<Int> b, Int e) {
        std::vector<Int> r = one_coords;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mulv(r, b);
            b = mulv(b, b);
            e >>= 1;
        }
        return r;
    };
    MatZ frob(n, n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Int> e(n);
        e[i] = 1;
        frob.set_row(i, powv(e, ell));
    }
    MatZ fk = frob;
    Int lk = ell;
    while (lk < Int(n)) {
        fk = fk * fk;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) fk.at(i, j) = fdiv_r(fk.at(i, j), ell);
        lk *= lk;
    }
    MatZ nil = fl_left_kernel(fk, ell);
    MatZ rows(n + nil.rows(), n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) rows.at(i, j) = ell * T->lattice().basis().at(i, j);
    for (size_t i = 0; i < nil.rows(); ++i)
        rows.set_row(n + i, row_times_mat(nil.row(i), T->lattice().basis()));
    return ZLattice::from_rows(T->algebra(), rows, T->lattice().denominator());
}

OrderPtr multiplicator_ring(const ZLattice& ideal) {
    return make_order(colon(ideal, ideal));
}

bool is_singular(const MaximalIdeal& m) { return m.singular; }

unsigned cm_type(const OrderPtr& T, const MaximalIdeal& m) {
    ZLattice cm = colon(T->lattice(), m.lat);
    Rat idx = lat_index(cm, T->lattice());
    // (T:m)/T is a T/m vector space of size residue_size^t
    Int num = idx.get_num();
    if (idx.get_den() != 1) throw err("orders", "Internal", "cm_type: non-integral index");
    unsigned t = 0;
    Int v = num;
    while (v > 1) {
        if (!divisible(v, m.residue_size))
            throw err("orders", "Internal", "cm_type: index not a residue power");
        v = divexact(v, m.residue_size);
        ++t;
    }
    return t;
}

bool is_gorenstein_at(const OrderPtr& T, const Int& ell) {
    for (const auto& m : maximal_ideals_above(T, ell))
        if (cm_type(T, m) != 1) return false;
    return true;
}

std::vector<MaximalIdeal> singular_primes(const OrderPtr& R, const OrderPtr& OK) {
    Rat idx = lat_index(OK->lattice(), R->lattice());
    if (idx.get_den() != 1)
        throw err("orders", "Internal", "R not inside the maximal order");
    std::vector<MaximalIdeal> out;
    if (idx == 1) return out;
    auto fac = factorize(idx.get_num());
    for (const auto& [p, e] : fac) {
        (void)e;
        for (const auto& m : maximal_ideals_above(R, p))
            if (m.singular) out.push_back(m);
    }
    return out;
}

std::string order_to_json(const OrderPtr& O) {
    return std::string("{\"kind\":\"order\",\"lattice\":") + O->lattice().to_json() + "}";
}

std::string ideal_to_json(const FractionalIdeal& I) {
    return std::string("{\"kind\":\"ideal\",\"lattice\":") + I.lat.to_json() +
           ",\"over\":" + I.over->lattice().to_json() + "}";
}

std::vector<MaximalIdeal> ideals_above_in(const OrderPtr& T, const MaximalIdeal& l) {
    std::vector<MaximalIdeal> out;
    for (const auto& L : maximal_ideals_above(T, l.ell)) {
        if (lat_intersect(L.lat, l.order->lattice()) == l.lat) out.push_back(L);
    }
    return out;
}

}  // namespace isovolc
