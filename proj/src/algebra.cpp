#include "isovolc/algebra.hpp"

#include <algorithm>

#include "isovolc/errors.hpp"

namespace isovolc {

void AlgebraElement::normalize() {
    if (den < 0) {
        den = -den;
        for (auto& v : num) v = -v;
    }
    Int g = den;
    for (const auto& v : num) {
        g = gcd(g, v);
        if (g == 1) break;
    }
    if (g > 1) {
        den = divexact(den, g);
        for (auto& v : num) v = divexact(v, g);
    }
}

bool AlgebraElement::operator==(const AlgebraElement& o) const {
    return den == o.den && num == o.num;
}

bool AlgebraElement::is_zero() const {
    return std::all_of(num.begin(), num.end(), [](const Int& v) { return v == 0; });
}

bool EtaleAlgebra::same_as(const EtaleAlgebra& o) const {
    return h_ == o.h_ && q_ == o.q_;
}

namespace {

// power sums Tr(pi^k) for k = 0..2n-2 via Newton's identities
std::vector<Int> power_sums(const IntPoly& h, size_t upto) {
    size_t n = h.size() - 1;
    // h = x^n + a_{n-1} x^{n-1} + ... + a_0; e_i = (-1)^i a_{n-i}
    std::vector<Int> p(upto + 1);
    p[0] = Int(n);
    for (size_t k = 1; k <= upto; ++k) {
        // p_k = -k a_{n-k} - sum_{i=1}^{k-1} a_{n-i} p_{k-i}, a_j = 0 for j < 0
        Int s = 0;
        if (k <= n) s += Int(k) * h[n - k];
        for (size_t i = 1; i < k; ++i)
            if (i <= n) s += h[n - i] * p[k - i];
        p[k] = -s;
    }
    return p;
}

std::vector<Int> reduce_mod_h(std::vector<Int> c, const IntPoly& h) {
    size_t n = h.size() - 1;
    for (size_t k = c.size(); k-- > n;) {
        if (c[k] == 0) continue;
        Int f = c[k];
        c[k] = 0;
        for (size_t j = 0; j < n; ++j) c[k - n + j] -= f * h[j];
    }
    c.resize(n);
    return c;
}

}  // namespace

AlgebraPtr make_algebra(IntPoly h, std::optional<Int> q, std::optional<Int> p_hint) {
    h = poly_trim(std::move(h));
    if (poly_degree(h) < 1 || !poly_is_monic(h))
        throw err("algebra_core", "BadPolynomial", "h must be monic of degree >= 1");
    IntPoly g = poly_gcd_q(h, poly_derivative(h));
    if (poly_degree(g) != 0)
        throw err("algebra_core", "NotSquarefree", "gcd(h, h') has positive degree");

    auto alg = AlgebraPtr(new EtaleAlgebra());
    auto* a = const_cast<EtaleAlgebra*>(alg.get());
    a->h_ = h;
    a->n_ = h.size() - 1;
    size_t n = a->n_;
    a->pow_table_.resize(2 * n - 1);
    for (size_t k = 0; k < 2 * n - 1; ++k) {
        std::vector<Int> c(k + 1);
        c[k] = 1;
        a->pow_table_[k] = reduce_mod_h(std::move(c), h);
    }
    {
        std::string k;
        for (const auto& c : h) k += c.get_str() + "_";
        if (q) k += "q" + q->get_str();
        a->key_ = k;
    }
    std::vector<Int> ps = power_sums(h, 2 * n - 2);
    a->trace_gram_ = MatZ(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a->trace_gram_.at(i, j) = ps[i + j];
    a->disc_ = poly_discriminant(h);

    if (q) {
        if (poly_eval(h, 0) == 0)
            throw err("algebra_core", "NotInvertible", "h(0) = 0, pi is a zero divisor");
        a->q_ = *q;
        // q = p^e for a rational prime p
        Int p;
        if (p_hint) {
            p = *p_hint;
        } else {
            auto f = factorize(*q);
            if (f.size() != 1)
                throw err("algebra_core", "BadFieldSize", "q is not a prime power");
            p = f.begin()->first;
        }
        a->p_ = p;
        // structural Weil check: q/pi integral over Z
        AlgebraElement qp = elem_q_over_pi(alg);
        if (!elem_is_integral(qp))
            throw err("algebra_core", "NotWeil", "q/pi is not integral");
    }
    return alg;
}

AlgebraElement elem_from_coords(AlgebraPtr a, std::vector<Int> num, Int den) {
    if (num.size() != a->degree())
        throw err("algebra_core", "BadCoords", "coordinate length mismatch");
    if (den == 0) throw err("algebra_core", "BadCoords", "zero denominator");
    AlgebraElement e{std::move(a), std::move(num), std::move(den)};
    e.normalize();
    return e;
}

AlgebraElement elem_zero(AlgebraPtr a) {
    return {std::move(a), std::vector<Int>(a->degree()), 1};
}

AlgebraElement elem_one(AlgebraPtr a) { return elem_int(std::move(a), 1); }

AlgebraElement elem_int(AlgebraPtr a, const Int& v) {
    std::vector<Int> c(a->degree());
    c[0] = v;
    return {std::move(a), std::move(c), 1};
}

AlgebraElement elem_pi(AlgebraPtr a) {
    std::vector<Int> c(a->degree());
    if (c.size() == 1) {
        // degree one: pi = -h0
        c[0] = -a->h()[0];
    } else {
        c[1] = 1;
    }
    return {std::move(a), std::move(c), 1};
}

AlgebraElement elem_q_over_pi(AlgebraPtr a) {
    if (!a->q()) throw err("algebra_core", "NoFieldSize", "algebra has no q");
    Int q = *a->q();
    return elem_mul_int(elem_inverse(elem_pi(a)), q);
}

namespace {

void check_same(const AlgebraElement& x, const AlgebraElement& y) {
    if (!x.alg->same_as(*y.alg))
        throw err("lattices", "MismatchedAlgebra", "elements from different algebras");
}

}  // namespace

AlgebraElement elem_add(const AlgebraElement& x, const AlgebraElement& y) {
    check_same(x, y);
    size_t n = x.alg->degree();
    Int d = lcm(x.den, y.den);
    Int fx = divexact(d, x.den), fy = divexact(d, y.den);
    std::vector<Int> c(n);
    for (size_t i = 0; i < n; ++i) c[i] = fx * x.num[i] + fy * y.num[i];
    AlgebraElement e{x.alg, std::move(c), d};
    e.normalize();
    return e;
}

AlgebraElement elem_neg(const AlgebraElement& x) {
    AlgebraElement e = x;
    for (auto& v : e.num) v = -v;
    return e;
}

AlgebraElement elem_sub(const AlgebraElement& x, const AlgebraElement& y) {
    return elem_add(x, elem_neg(y));
}

AlgebraElement elem_mul(const AlgebraElement& x, const AlgebraElement& y) {
    check_same(x, y);
    size_t n = x.alg->degree();
    std::vector<Int> prod(2 * n - 1);
    for (size_t i = 0; i < n; ++i) {
        if (x.num[i] == 0) continue;
        for (size_t j = 0; j < n; ++j) prod[i + j] += x.num[i] * y.num[j];
    }
    // fold via the power table
    std::vector<Int> c(n);
    for (size_t k = 0; k < 2 * n - 1; ++k) {
        if (prod[k] == 0) continue;
        const auto& pk = x.alg->pi_power(k);
        for (size_t j = 0; j < n; ++j) c[j] += prod[k] * pk[j];
    }
    AlgebraElement e{x.alg, std::move(c), x.den * y.den};
    e.normalize();
    return e;
}

AlgebraElement elem_mul_int(const AlgebraElement& x, const Int& v) {
    AlgebraElement e = x;
    for (auto& c : e.num) c *= v;
    e.normalize();
    return e;
}

AlgebraElement elem_pow(const AlgebraElement& x, unsigned long e) {
    AlgebraElement r = elem_one(x.alg);
    AlgebraElement b = x;
    while (e) {
        if (e & 1) r = elem_mul(r, b);
        b = elem_mul(b, b);
        e >>= 1;
    }
    return r;
}

MatZ elem_mul_matrix_num(const AlgebraElement& x) {
    size_t n = x.alg->degree();
    MatZ m(n, n);
    AlgebraElement xi{x.alg, x.num, 1};
    for (size_t i = 0; i < n; ++i) {
        // row i = coords of pi^i * x (numerator part)
        std::vector<Int> prod(2 * n - 1);
        for (size_t j = 0; j < n; ++j) prod[i + j] = x.num[j];
        std::vector<Int> c(n);
        for (size_t k = 0; k < 2 * n - 1; ++k) {
            if (prod[k] == 0) continue;
            const auto& pk = x.alg->pi_power(k);
            for (size_t j = 0; j < n; ++j) c[j] += prod[k] * pk[j];
        }
        m.set_row(i, c);
    }
    return m;
}

bool elem_is_regular(const AlgebraElement& x) {
    return det(elem_mul_matrix_num(x)) != 0;
}

AlgebraElement elem_inverse(const AlgebraElement& x) {
    size_t n = x.alg->degree();
    MatZ m = elem_mul_matrix_num(x);
    std::vector<Int> rhs(n);
    rhs[0] = 1;
    std::vector<Int> sol;
    Int den;
    if (!solve_left_rational(m, rhs, 1, sol, den))
        throw err("algebra_core", "ZeroDivisor", "inverse of a zero divisor");
    // x/den0 has inverse den0 * sol/den
    for (auto& v : sol) v *= x.den;
    AlgebraElement e{x.alg, std::move(sol), den};
    e.normalize();
    return e;
}

Rat elem_trace(const AlgebraElement& x) {
    const MatZ& g = x.alg->trace_gram();
    Int t = 0;
    for (size_t i = 0; i < x.num.size(); ++i) t += x.num[i] * g.at(0, i);
    Rat r(t, x.den);
    r.canonicalize();
    return r;
}

Rat elem_norm(const AlgebraElement& x) {
    Int d = det(elem_mul_matrix_num(x));
    Rat r(d, pow_int(x.den, static_cast<unsigned long>(x.alg->degree())));
    r.canonicalize();
    return r;
}

IntPoly integer_minimal_polynomial(const AlgebraElement& x) {
    size_t n = x.alg->degree();
    // find minimal k with 1, x, ..., x^k dependent over Q
    std::vector<AlgebraElement> pows{elem_one(x.alg)};
    for (size_t k = 1; k <= n; ++k) {
        pows.push_back(elem_mul(pows.back(), x));
        // rows: coords of pows scaled to integers
        Int den = 1;
        for (const auto& p : pows) den = lcm(den, p.den);
        MatZ m(pows.size(), n);
        for (size_t i = 0; i < pows.size(); ++i) {
            Int f = divexact(den, pows[i].den);
            std::vector<Int> row(n);
            for (size_t j = 0; j < n; ++j) row[j] = pows[i].num[j] * f;
            m.set_row(i, row);
        }
        MatZ ker = left_kernel(m);
        if (ker.rows() > 0) {
            // minimal dependence: x^k = -(c_0 + ... + c_{k-1} x^{k-1}) / c_k
            std::vector<Int> rel = ker.row(0);
            IntPoly poly(rel.begin(), rel.end());
            poly = poly_primitive(poly);
            return poly;
        }
    }
    throw err("algebra_core", "Internal", "no minimal polynomial found");
}

bool elem_is_integral(const AlgebraElement& x) {
    IntPoly mp = integer_minimal_polynomial(x);
    return poly_is_monic(mp);
}

}  // namespace isovolc
