#include "isovolc/lattice.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "isovolc/errors.hpp"

namespace isovolc {

namespace {

void check_same_algebra(const ZLattice& a, const ZLattice& b) {
    if (!a.algebra() || !b.algebra() || !a.algebra()->same_as(*b.algebra()))
        throw err("lattices", "MismatchedAlgebra", "lattices from different algebras");
}

}  // namespace

ZLattice ZLattice::from_rows(AlgebraPtr alg, MatZ rows, Int den) {
    if (den == 0) throw err("lattices", "BadDenominator", "zero denominator");
    if (den < 0) {
        den = -den;
        rows = rows * Int(-1);
    }
    MatZ h = hnf(std::move(rows));
    if (h.rows() != alg->degree())
        throw err("lattices", "RankDeficient", "lattice is not full rank");
    Int g = gcd(den, h.content());
    if (g > 1) {
        h.divexact_all(g);
        den = divexact(den, g);
    }
    ZLattice l;
    l.alg_ = std::move(alg);
    l.den_ = std::move(den);
    l.basis_ = std::move(h);
    return l;
}

ZLattice ZLattice::from_generators(AlgebraPtr alg, const std::vector<AlgebraElement>& gens) {
    size_t n = alg->degree();
    Int den = 1;
    for (const auto& g : gens) den = lcm(den, g.den);
    MatZ rows(gens.size(), n);
    for (size_t i = 0; i < gens.size(); ++i) {
        Int f = divexact(den, gens[i].den);
        for (size_t j = 0; j < n; ++j) rows.at(i, j) = gens[i].num[j] * f;
    }
    return from_rows(std::move(alg), std::move(rows), std::move(den));
}

ZLattice ZLattice::standard(AlgebraPtr alg) {
    size_t n = alg->degree();
    return from_rows(std::move(alg), MatZ::identity(n), 1);
}

AlgebraElement ZLattice::element_at(size_t i) const {
    return elem_from_coords(alg_, basis_.row(i), den_);
}

std::vector<AlgebraElement> ZLattice::basis_elements() const {
    std::vector<AlgebraElement> v;
    for (size_t i = 0; i < rank(); ++i) v.push_back(element_at(i));
    return v;
}

bool ZLattice::contains(const AlgebraElement& x) const {
    // back substitution through the upper triangular basis:
    // x = sum c_i * row_i / den with c_i integers
    size_t n = alg_->degree();
    // target coords scaled: x.num/x.den = c * basis / den  =>
    // c * basis = x.num * den / x.den, must be integral
    std::vector<Int> t(n);
    Int scale = den_;
    for (size_t j = 0; j < n; ++j) {
        Int v = x.num[j] * scale;
        if (!divisible(v, x.den)) return false;
        t[j] = divexact(v, x.den);
    }
    for (size_t i = 0; i < n; ++i) {
        if (t[i] == 0) continue;
        if (!divisible(t[i], basis_.at(i, i))) return false;
        Int c = divexact(t[i], basis_.at(i, i));
        for (size_t j = i; j < n; ++j) t[j] -= c * basis_.at(i, j);
    }
    return true;
}

bool ZLattice::contains_lattice(const ZLattice& other) const {
    check_same_algebra(*this, other);
    for (size_t i = 0; i < other.rank(); ++i)
        if (!contains(other.element_at(i))) return false;
    return true;
}

bool ZLattice::contains_one() const {
    return contains(elem_one(alg_));
}

bool ZLattice::operator==(const ZLattice& o) const {
    return den_ == o.den_ && basis_ == o.basis_;
}

int ZLattice::compare(const ZLattice& o) const {
    int c = cmp(den_, o.den_);
    if (c) return c;
    return basis_.compare(o.basis_);
}

std::string ZLattice::key() const {
    std::ostringstream os;
    os << alg_->key() << "|" << den_.get_str();
    for (size_t i = 0; i < basis_.rows(); ++i)
        for (size_t j = 0; j < basis_.cols(); ++j) os << "," << basis_.at(i, j).get_str();
    return os.str();
}

Rat ZLattice::covolume() const {
    Rat r(det_upper_triangular(basis_), pow_int(den_, static_cast<unsigned long>(alg_->degree())));
    r.canonicalize();
    return r;
}

std::string ZLattice::to_json() const {
    nlohmann::json j;
    j["denominator"] = den_.get_str();
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < basis_.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t k = 0; k < basis_.cols(); ++k) row.push_back(basis_.at(i, k).get_str());
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump();
}

ZLattice ZLattice::from_json(AlgebraPtr alg, const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Int den = int_from_string(j.at("denominator").get<std::string>());
    auto rows = j.at("rows");
    MatZ m(rows.size(), alg->degree());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t k = 0; k < rows[i].size(); ++k)
            m.at(i, k) = int_from_string(rows[i][k].get<std::string>());
    return from_rows(std::move(alg), std::move(m), std::move(den));
}

ZLattice lat_sum(const ZLattice& a, const ZLattice& b) {
    check_same_algebra(a, b);
    Int den = lcm(a.denominator(), b.denominator());
    MatZ stacked = MatZ::vstack(a.basis() * divexact(den, a.denominator()),
                                b.basis() * divexact(den, b.denominator()));
    return ZLattice::from_rows(a.algebra(), std::move(stacked), std::move(den));
}

ZLattice lat_add_element(const ZLattice& a, const AlgebraElement& x) {
    size_t n = a.algebra()->degree();
    Int den = lcm(a.denominator(), x.den);
    MatZ rows(n + 1, n);
    Int fa = divexact(den, a.denominator());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) rows.at(i, j) = a.basis().at(i, j) * fa;
    Int fx = divexact(den, x.den);
    for (size_t j = 0; j < n; ++j) rows.at(n, j) = x.num[j] * fx;
    return ZLattice::from_rows(a.algebra(), std::move(rows), std::move(den));
}

ZLattice lat_intersect(const ZLattice& a, const ZLattice& b) {
    check_same_algebra(a, b);
    // kernel of the stacked system: rows (u | v) with u A' = v B'
    Int den = lcm(a.denominator(), b.denominator());
    MatZ A = a.basis() * divexact(den, a.denominator());
    MatZ B = b.basis() * divexact(den, b.denominator());
    MatZ stacked = MatZ::vstack(A, B * Int(-1));
    MatZ ker = left_kernel(stacked);
    size_t n = a.algebra()->degree();
    MatZ rows(ker.rows(), n);
    for (size_t i = 0; i < ker.rows(); ++i) {
        std::vector<Int> full = ker.row(i);
        std::vector<Int> u(full.begin(), full.begin() + n);
        rows.set_row(i, row_times_mat(u, A));
    }
    return ZLattice::from_rows(a.algebra(), std::move(rows), std::move(den));
}

ZLattice lat_product(const ZLattice& a, const ZLattice& b) {
    check_same_algebra(a, b);
    size_t n = a.algebra()->degree();
    MatZ rows(n * n, n);
    for (size_t i = 0; i < n; ++i) {
        AlgebraElement ai{a.algebra(), a.basis().row(i), 1};
        MatZ mul = elem_mul_matrix_num(ai);
        for (size_t j = 0; j < n; ++j)
            rows.set_row(i * n + j, row_times_mat(b.basis().row(j), mul));
    }
    return ZLattice::from_rows(a.algebra(), std::move(rows),
                               a.denominator() * b.denominator());
}

ZLattice lat_scale(const ZLattice& a, const AlgebraElement& x) {
    if (!elem_is_regular(x))
        throw err("lattices", "ZeroDivisor", "scaling by a zero divisor");
    MatZ mul = elem_mul_matrix_num(x);
    MatZ rows = a.basis() * Int(1);
    MatZ scaled(rows.rows(), rows.cols());
    for (size_t i = 0; i < rows.rows(); ++i)
        scaled.set_row(i, row_times_mat(rows.row(i), mul));
    return ZLattice::from_rows(a.algebra(), std::move(scaled), a.denominator() * x.den);
}

ZLattice lat_scale_rat(const ZLattice& a, const Rat& r) {
    if (r == 0) throw err("lattices", "ZeroDivisor", "scaling by zero");
    return ZLattice::from_rows(a.algebra(), a.basis() * r.get_num(),
                               a.denominator() * r.get_den());
}

ZLattice lat_pow(const ZLattice& a, unsigned e, const ZLattice& unit) {
    ZLattice r = unit;
    for (unsigned i = 0; i < e; ++i) r = lat_product(r, a);
    return r;
}

ZLattice colon(const ZLattice& l1, const ZLattice& l2) {
    check_same_algebra(l1, l2);
    size_t n = l1.algebra()->degree();
    // condition: v * Mul(b_j) * adj(A) * d1 in (d2 * det A) Z^n for each basis
    // row b_j of L2, where A is the basis of L1
    Int detA = det_upper_triangular(l1.basis());
    MatZ adjA = adjugate(l1.basis(), detA);
    Int e = l2.denominator() * detA;
    MatZ stacked(n, n * n);
    for (size_t j = 0; j < n; ++j) {
        AlgebraElement bj{l2.algebra(), l2.basis().row(j), 1};
        MatZ nj = elem_mul_matrix_num(bj) * adjA;
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c)
                stacked.at(r, j * n + c) = nj.at(r, c) * l1.denominator();
    }
    // column HNF via the transpose: H = (row HNF of stacked^T)^T
    MatZ ht = hnf(stacked.transpose());
    if (ht.rows() != n) throw err("lattices", "Internal", "colon: rank deficiency");
    MatZ H = ht.transpose();
    Int detH = det_upper_triangular(ht);
    MatZ Hinv_scaled = adjugate(H, detH);  // detH * H^{-1}
    // solution lattice = e * Z^n * H^{-1} = (e/detH) * rowspan(detH * H^{-1})
    return ZLattice::from_rows(l1.algebra(), Hinv_scaled * e, detH);
}

Rat lat_index(const ZLattice& l1, const ZLattice& l2) {
    check_same_algebra(l1, l2);
    Rat r = l2.covolume() / l1.covolume();
    r.canonicalize();
    if (r < 0) r = -r;
    return r;
}

std::vector<Int> quotient_invariants(const ZLattice& l1, const ZLattice& l2) {
    check_same_algebra(l1, l2);
    if (!l1.contains_lattice(l2))
        throw err("lattices", "NotContained", "quotient_invariants requires L2 <= L1");
    size_t n = l1.algebra()->degree();
    // C with (B/d2) = C (A/d1): solve rows through the triangular basis
    MatZ C(n, n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Int> t(n);
        for (size_t j = 0; j < n; ++j) t[j] = l2.basis().at(i, j) * l1.denominator();
        // forward substitution through the triangular basis
        for (size_t k = 0; k < n; ++k) {
            Int den = l1.basis().at(k, k) * l2.denominator();
            if (!divisible(t[k], den))
                throw err("lattices", "Internal", "quotient_invariants: non-integral");
            Int c = divexact(t[k], den);
            C.at(i, k) = c;
            for (size_t j = k; j < n; ++j) t[j] -= c * l1.basis().at(k, j) * l2.denominator();
        }
    }
    std::vector<Int> d = snf(C);
    std::vector<Int> out;
    for (auto& v : d) {
        if (v < 0) v = -v;
        if (v != 1) out.push_back(v);
    }
    return out;
}

}  // namespace isovolc
