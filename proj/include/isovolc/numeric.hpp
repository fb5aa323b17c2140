#ifndef ISOVOLC_NUMERIC_HPP
#define ISOVOLC_NUMERIC_HPP

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace isovolc {

using Int = mpz_class;
using Rat = mpq_class;

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int divexact(const Int& a, const Int& b) {
    Int r;
    mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// floor division and the matching non-negative remainder
inline Int fdiv_q(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int fdiv_r(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// quotient rounded to nearest, used to keep HNF pivoting entries small
inline Int round_q(const Int& a, const Int& b) {
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    Int babs = abs(b);
    if (2 * r > babs) q += 1;
    return q;
}

inline Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline bool divisible(const Int& a, const Int& b) {
    return mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()) != 0;
}

inline Int invmod(const Int& a, const Int& m) {
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        r = 0;
    return r;
}

inline Int powmod(const Int& b, const Int& e, const Int& m) {
    Int r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

bool is_prime(const Int& n);

// v_p(n) together with the cofactor n / p^v
std::pair<unsigned, Int> valuation(Int n, const Int& p);

// Trial division up to the bound, then Pollard rho with a fixed seed.
// Throws FactorizationIncomplete when a composite cofactor survives.
std::map<Int, unsigned> factorize(const Int& n,
                                  unsigned long trial_bound = 1000000,
                                  const std::map<Int, unsigned>* hints = nullptr);

// exact square root of a perfect-square rational; nullopt otherwise
std::optional<Rat> sqrt_exact(const Rat& r);

std::string to_string(const Int& v);
Int int_from_string(const std::string& s);

}  // namespace isovolc

#endif
