#ifndef ISOVOLC_POLY_HPP
#define ISOVOLC_POLY_HPP

#include <vector>

#include "isovolc/numeric.hpp"

namespace isovolc {

// Coefficient lists, ascending degree.  The zero polynomial is {}.
using IntPoly = std::vector<Int>;

IntPoly poly_trim(IntPoly p);
int poly_degree(const IntPoly& p);  // -1 for zero
bool poly_is_monic(const IntPoly& p);
IntPoly poly_add(const IntPoly& a, const IntPoly& b);
IntPoly poly_sub(const IntPoly& a, const IntPoly& b);
IntPoly poly_mul(const IntPoly& a, const IntPoly& b);
IntPoly poly_derivative(const IntPoly& p);
Int poly_eval(const IntPoly& p, const Int& x);
Int poly_content(const IntPoly& p);
IntPoly poly_primitive(const IntPoly& p);  // content 1, positive leading coeff

// gcd over Q, returned as a primitive integer polynomial
IntPoly poly_gcd_q(const IntPoly& a, const IntPoly& b);

Int resultant(const IntPoly& f, const IntPoly& g);
Int poly_discriminant(const IntPoly& f);  // f monic

// ---- dense polynomials over F_ell ----

struct FlPoly {
    Int ell;
    std::vector<Int> c;  // ascending, entries in [0, ell)
};

FlPoly fl_make(const Int& ell, std::vector<Int> c);
int fl_degree(const FlPoly& p);
FlPoly fl_mul(const FlPoly& a, const FlPoly& b);
FlPoly fl_mod(const FlPoly& a, const FlPoly& m);
FlPoly fl_sub(const FlPoly& a, const FlPoly& b);
FlPoly fl_powmod(const FlPoly& b, const Int& e, const FlPoly& m);
FlPoly fl_gcd(FlPoly a, FlPoly b);  // monic

// All roots in F_ell of a squarefree polynomial that splits completely.
// Deterministic output order (ascending).
std::vector<Int> fl_roots_of_split(const FlPoly& f);

}  // namespace isovolc

#endif
