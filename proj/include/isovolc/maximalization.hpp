#ifndef ISOVOLC_MAXIMALIZATION_HPP
#define ISOVOLC_MAXIMALIZATION_HPP

#include <optional>

#include "isovolc/orders.hpp"

namespace isovolc {

struct FactoredIndex {
    enum class Source { trial_division, pollard_rho, user_supplied };
    std::map<Int, unsigned> primes;
    Source source = Source::trial_division;
};

// Smallest overorder O of T with O_ell = (O_K)_ell, by iterated
// radical-multiplicator saturation.
OrderPtr l_maximal_overorder(const OrderPtr& T, const Int& ell);

// O_K as the sum of ell-maximalizations of Z[pi] over primes whose square
// divides disc(h).  Throws FactorizationIncomplete when the discriminant
// resists the built-in factorization and no hints cover the cofactor.
OrderPtr maximal_order(const AlgebraPtr& alg,
                       const std::optional<FactoredIndex>& hints = std::nullopt);

// conductor (T : O_K), the largest O_K-ideal inside T
FractionalIdeal conductor(const OrderPtr& T, const OrderPtr& OK);

// (T : O) for O the ell-maximal overorder of T; valid for ell-local questions
FractionalIdeal conductor_l_part(const OrderPtr& T, const Int& ell);

// smallest overorder that is maximal at the given maximal ideal only
OrderPtr p_saturation_at(const OrderPtr& T, const MaximalIdeal& p);

}  // namespace isovolc

#endif
