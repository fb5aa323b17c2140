#ifndef ISOVOLC_ALGEBRA_HPP
#define ISOVOLC_ALGEBRA_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "isovolc/matrix.hpp"
#include "isovolc/numeric.hpp"
#include "isovolc/poly.hpp"

namespace isovolc {

class EtaleAlgebra;
using AlgebraPtr = std::shared_ptr<const EtaleAlgebra>;

// Element of K = Q[x]/(h) in the power basis 1, pi, ..., pi^{n-1}.
// One shared denominator, coordinates in lowest shared terms.
struct AlgebraElement {
    AlgebraPtr alg;
    std::vector<Int> num;
    Int den = 1;

    void normalize();
    bool operator==(const AlgebraElement& o) const;
    bool is_zero() const;
};

// Q[x]/(h(x)) for a monic squarefree integer polynomial h.  Immutable after
// construction and freely shareable.
class EtaleAlgebra : public std::enable_shared_from_this<EtaleAlgebra> {
public:
    const IntPoly& h() const { return h_; }
    size_t degree() const { return n_; }
    const std::optional<Int>& q() const { return q_; }
    const std::optional<Int>& p() const { return p_; }

    // pi^k reduced mod h, 0 <= k <= 2n-2 (integer coords since h is monic)
    const std::vector<Int>& pi_power(size_t k) const { return pow_table_[k]; }

    // trace form Gram matrix T[i][j] = Tr(pi^{i+j}); nonsingular since h is
    // squarefree
    const MatZ& trace_gram() const { return trace_gram_; }

    Int discriminant() const { return disc_; }  // disc(h) = disc(Z[pi])

    bool same_as(const EtaleAlgebra& o) const;

    // stable identity string (h coefficients and q), used in memo keys
    const std::string& key() const { return key_; }

    friend AlgebraPtr make_algebra(IntPoly h, std::optional<Int> q,
                                   std::optional<Int> p_hint);

private:
    EtaleAlgebra() = default;
    IntPoly h_;
    size_t n_ = 0;
    std::optional<Int> q_, p_;
    std::vector<std::vector<Int>> pow_table_;
    MatZ trace_gram_;
    Int disc_;
    std::string key_;
};

// Errors: NotSquarefree, NotInvertible (h(0) = 0 with q set), NotWeil
// (q/pi not integral).
AlgebraPtr make_algebra(IntPoly h, std::optional<Int> q = std::nullopt,
                        std::optional<Int> p_hint = std::nullopt);

AlgebraElement elem_from_coords(AlgebraPtr a, std::vector<Int> num, Int den = 1);
AlgebraElement elem_zero(AlgebraPtr a);
AlgebraElement elem_one(AlgebraPtr a);
AlgebraElement elem_int(AlgebraPtr a, const Int& v);
AlgebraElement elem_pi(AlgebraPtr a);
AlgebraElement elem_q_over_pi(AlgebraPtr a);  // requires q

AlgebraElement elem_add(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement elem_sub(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement elem_neg(const AlgebraElement& x);
AlgebraElement elem_mul(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement elem_mul_int(const AlgebraElement& x, const Int& v);
AlgebraElement elem_pow(const AlgebraElement& x, unsigned long e);

// Throws ZeroDivisor when x is not regular (K may be a product of fields).
AlgebraElement elem_inverse(const AlgebraElement& x);
bool elem_is_regular(const AlgebraElement& x);

Rat elem_trace(const AlgebraElement& x);
Rat elem_norm(const AlgebraElement& x);

// Multiplication-by-x matrix M with numerator/denominator split:
// coords(y*x) = coords(y) * M / den for integer-coordinate rows.
MatZ elem_mul_matrix_num(const AlgebraElement& x);  // uses x.num only

// Monic minimal polynomial over Q cleared to a content-1 integer polynomial.
IntPoly integer_minimal_polynomial(const AlgebraElement& x);
bool elem_is_integral(const AlgebraElement& x);

}  // namespace isovolc

#endif
