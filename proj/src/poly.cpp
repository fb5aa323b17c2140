#include "isovolc/poly.hpp"

#include <algorithm>

#include "isovolc/errors.hpp"
#include "isovolc/matrix.hpp"

namespace isovolc {

IntPoly poly_trim(IntPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

int poly_degree(const IntPoly& p) { return static_cast<int>(p.size()) - 1; }

bool poly_is_monic(const IntPoly& p) { return !p.empty() && p.back() == 1; }

IntPoly poly_add(const IntPoly& a, const IntPoly& b) {
    IntPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return poly_trim(r);
}

IntPoly poly_sub(const IntPoly& a, const IntPoly& b) {
    IntPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return poly_trim(r);
}

IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
    if (a.empty() || b.empty()) return {};
    IntPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return poly_trim(r);
}

IntPoly poly_derivative(const IntPoly& p) {
    IntPoly r;
    for (size_t i = 1; i < p.size(); ++i) r.push_back(Int(i) * p[i]);
    return poly_trim(r);
}

Int poly_eval(const IntPoly& p, const Int& x) {
    Int v = 0;
    for (size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

Int poly_content(const IntPoly& p) {
    Int g = 0;
    for (const auto& c : p) g = gcd(g, c);
    return g;
}

IntPoly poly_primitive(const IntPoly& p) {
    IntPoly r = poly_trim(p);
    if (r.empty()) return r;
    Int g = poly_content(r);
    if (r.back() < 0) g = -g;
    for (auto& c : r) c = divexact(c, g);
    return r;
}

namespace {

using RatPoly = std::vector<Rat>;

RatPoly rp_trim(RatPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

RatPoly rp_from(const IntPoly& p) {
    RatPoly r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[i] = Rat(p[i]);
    return r;
}

// remainder of Euclidean division over Q
RatPoly rp_rem(RatPoly a, const RatPoly& b) {
    while (a.size() >= b.size() && !a.empty()) {
        Rat f = a.back() / b.back();
        size_t off = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[off + i] -= f * b[i];
        a = rp_trim(a);
        if (a.size() < b.size()) break;
    }
    return a;
}

}  // namespace

IntPoly poly_gcd_q(const IntPoly& a0, const IntPoly& b0) {
    RatPoly a = rp_from(poly_trim(a0)), b = rp_from(poly_trim(b0));
    if (a.empty()) return poly_primitive(b0);
    if (b.empty()) return poly_primitive(a0);
    while (!b.empty()) {
        RatPoly r = rp_rem(a, b);
        a = b;
        b = r;
    }
    // clear denominators, primitive part
    Int den = 1;
    for (const auto& c : a) den = lcm(den, c.get_den());
    IntPoly g(a.size());
    for (size_t i = 0; i < a.size(); ++i) g[i] = a[i].get_num() * divexact(den, a[i].get_den());
    return poly_primitive(g);
}

Int resultant(const IntPoly& f0, const IntPoly& g0) {
    IntPoly f = poly_trim(f0), g = poly_trim(g0);
    int m = poly_degree(f), n = poly_degree(g);
    if (m < 0 || n < 0) return 0;
    if (m == 0) return pow_int(f[0], n);
    if (n == 0) return pow_int(g[0], m);
    MatZ s(m + n, m + n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) s.at(i, i + j) = f[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) s.at(n + i, i + j) = g[n - j];
    return det(s);
}

Int poly_discriminant(const IntPoly& f) {
    int n = poly_degree(f);
    if (n < 1) throw err("poly", "BadDegree", "discriminant needs degree >= 1");
    Int r = resultant(f, poly_derivative(f));
    // disc = (-1)^{n(n-1)/2} res(f, f') for monic f
    if ((Int(n) * (n - 1) / 2) % 2 != 0) r = -r;
    return r;
}

// ---- F_ell polynomials ----

FlPoly fl_make(const Int& ell, std::vector<Int> c) {
    for (auto& v : c) v = fdiv_r(v, ell);
    while (!c.empty() && c.back() == 0) c.pop_back();
    return {ell, std::move(c)};
}

int fl_degree(const FlPoly& p) { return static_cast<int>(p.c.size()) - 1; }

FlPoly fl_mul(const FlPoly& a, const FlPoly& b) {
    if (a.c.empty() || b.c.empty()) return {a.ell, {}};
    std::vector<Int> r(a.c.size() + b.c.size() - 1);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    }
    return fl_make(a.ell, std::move(r));
}

FlPoly fl_sub(const FlPoly& a, const FlPoly& b) {
    std::vector<Int> r(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return fl_make(a.ell, std::move(r));
}

FlPoly fl_mod(const FlPoly& a0, const FlPoly& m) {
    FlPoly a = a0;
    if (m.c.empty()) throw err("poly", "DivZero", "fl_mod by zero");
    Int lcinv = invmod(m.c.back(), m.ell);
    while (a.c.size() >= m.c.size() && !a.c.empty()) {
        Int f = fdiv_r(a.c.back() * lcinv, a.ell);
        size_t off = a.c.size() - m.c.size();
        for (size_t i = 0; i < m.c.size(); ++i)
            a.c[off + i] = fdiv_r(a.c[off + i] - f * m.c[i], a.ell);
        while (!a.c.empty() && a.c.back() == 0) a.c.pop_back();
    }
    return a;
}

FlPoly fl_powmod(const FlPoly& b, const Int& e, const FlPoly& m) {
    FlPoly result = fl_make(b.ell, {1});
    FlPoly base = fl_mod(b, m);
    Int k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) result = fl_mod(fl_mul(result, base), m);
        base = fl_mod(fl_mul(base, base), m);
        k >>= 1;
    }
    return result;
}

FlPoly fl_gcd(FlPoly a, FlPoly b) {
    while (!b.c.empty()) {
        FlPoly r = fl_mod(a, b);
        a = b;
        b = r;
    }
    if (!a.c.empty() && a.c.back() != 1) {
        Int inv = invmod(a.c.back(), a.ell);
        for (auto& v : a.c) v = fdiv_r(v * inv, a.ell);
    }
    return a;
}

namespace {

void fl_roots_rec(const FlPoly& f, std::vector<Int>& out) {
    int d = fl_degree(f);
    if (d <= 0) return;
    if (d == 1) {
        // monic x + c -> root -c
        Int lcinv = invmod(f.c[1], f.ell);
        out.push_back(fdiv_r(-f.c[0] * lcinv, f.ell));
        return;
    }
    // split with gcd(f, (x+a)^((ell-1)/2) - 1), a = 0, 1, 2, ...
    Int e = (f.ell - 1) / 2;
    for (Int a = 0;; ++a) {
        FlPoly shift = fl_make(f.ell, {a, 1});
        FlPoly pw = fl_powmod(shift, e, f);
        pw = fl_sub(pw, fl_make(f.ell, {1}));
        FlPoly g = fl_gcd(pw, f);
        int dg = fl_degree(g);
        if (dg > 0 && dg < d) {
            fl_roots_rec(g, out);
            // cofactor = f / g by repeated division
            FlPoly q = f;
            // long division f by g
            std::vector<Int> quot(f.c.size() - g.c.size() + 1);
            FlPoly rem = f;
            Int lcinv = invmod(g.c.back(), f.ell);
            while (rem.c.size() >= g.c.size() && !rem.c.empty()) {
                Int fac = fdiv_r(rem.c.back() * lcinv, f.ell);
                size_t off = rem.c.size() - g.c.size();
                quot[off] = fac;
                for (size_t i = 0; i < g.c.size(); ++i)
                    rem.c[off + i] = fdiv_r(rem.c[off + i] - fac * g.c[i], f.ell);
                while (!rem.c.empty() && rem.c.back() == 0) rem.c.pop_back();
            }
            fl_roots_rec(fl_make(f.ell, quot), out);
            return;
        }
    }
}

}  // namespace

std::vector<Int> fl_roots_of_split(const FlPoly& f) {
    std::vector<Int> out;
    if (f.ell < 1 << 16) {
        // small ell: direct scan
        for (Int a = 0; a < f.ell; ++a) {
            Int v = 0;
            for (size_t i = f.c.size(); i-- > 0;) v = fdiv_r(v * a + f.c[i], f.ell);
            if (v == 0) out.push_back(a);
        }
        return out;
    }
    if (f.ell == 2) {
        for (Int a = 0; a < 2; ++a)
            if (fdiv_r(poly_eval(f.c, a), f.ell) == 0) out.push_back(a);
        return out;
    }
    fl_roots_rec(f, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace isovolc
