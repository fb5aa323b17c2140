#include "isovolc/numeric.hpp"

#include "isovolc/errors.hpp"

namespace isovolc {

bool is_prime(const Int& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

std::pair<unsigned, Int> valuation(Int n, const Int& p) {
    unsigned v = 0;
    while (n != 0 && divisible(n, p)) {
        n = divexact(n, p);
        ++v;
    }
    return {v, n};
}

namespace {

// Pollard rho with Floyd cycle detection.  The constant-increment walk is
// deterministic; restarts bump the increment so repeated runs reproduce.
Int pollard_rho(const Int& n) {
    if (divisible(n, 2)) return 2;
    for (unsigned long c = 1;; ++c) {
        Int x = 2, y = 2, d = 1;
        Int inc = c;
        unsigned long iter = 0;
        while (d == 1) {
            x = (x * x + inc) % n;
            y = (y * y + inc) % n;
            y = (y * y + inc) % n;
            d = gcd(abs(x - y), n);
            if (++iter > 10000000ul) break;
        }
        if (d != 1 && d != n) return d;
    }
}

void factor_rec(const Int& n, std::map<Int, unsigned>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out[n] += 1;
        return;
    }
    Int d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(divexact(n, d), out);
}

}  // namespace

std::map<Int, unsigned> factorize(const Int& n, unsigned long trial_bound,
                                  const std::map<Int, unsigned>* hints) {
    std::map<Int, unsigned> out;
    Int m = abs(n);
    if (m == 0) throw err("numeric", "ZeroFactorization", "cannot factor 0");
    if (hints) {
        for (const auto& [p, e] : *hints) {
            (void)e;
            auto [v, rest] = valuation(m, p);
            if (v) out[p] += v;
            m = rest;
        }
    }
    for (unsigned long p = 2; p <= trial_bound && m > 1; p += (p == 2 ? 1 : 2)) {
        if (Int(p) * p > m) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            out[Int(p)] += 1;
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        }
    }
    if (m > 1) {
        if (is_prime(m)) {
            out[m] += 1;
        } else {
            // rho handles the desk-scale cofactors; give up past 2^128
            if (mpz_sizeinbase(m.get_mpz_t(), 2) > 128)
                throw FactorizationIncomplete(m.get_str());
            factor_rec(m, out);
        }
    }
    return out;
}

std::optional<Rat> sqrt_exact(const Rat& r) {
    if (r < 0) return std::nullopt;
    Int num = r.get_num(), den = r.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    Int sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    return Rat(sn, sd);
}

std::string to_string(const Int& v) { return v.get_str(); }

Int int_from_string(const std::string& s) {
    Int v;
    if (mpz_set_str(v.get_mpz_t(), s.c_str(), 10) != 0)
        throw err("numeric", "BadInteger", "not a decimal integer: " + s);
    return v;
}

}  // namespace isovolc
