#ifndef ISOVOLC_LMFDB_HPP
#define ISOVOLC_LMFDB_HPP

#include <optional>
#include <string>

#include "isovolc/poly.hpp"

namespace isovolc {

struct LmfdbLabel {
    unsigned g = 0;
    Int q;
    std::vector<std::string> coeff_code;  // base-26 segments for a_1..a_g

    std::string str() const;
};

struct WeilRecord {
    std::string label;
    unsigned g = 0;
    Int q;
    Int p;
    IntPoly h;  // ascending coefficients
    std::optional<bool> is_ordinary;
};

// "g.q.code" -> label parts; BadLabel on syntax errors
LmfdbLabel parse_label(const std::string& label);

// decode the Weil polynomial: code gives a_1..a_g, the functional equation
// a_{2g-i} = q^{g-i} a_i fills in the rest
WeilRecord decode_label(const std::string& label);
std::string encode_label(unsigned g, const Int& q, const IntPoly& h);

// x^{2g} h(q/x) = q^g h(x)
bool weil_symmetry_holds(const IntPoly& h, const Int& q);

struct FetchOptions {
    bool offline = false;
    std::string endpoint;   // empty: built-in default
    std::string cache_dir;  // empty: env or default
};

// Resolution order: cache, bundled fixture, network (unless offline).
// Errors: NetworkUnavailable, UpstreamSchemaChange, BadLabel.
WeilRecord fetch(const std::string& label, const FetchOptions& opts = {});

std::string default_cache_dir();
std::string fixture_dir();

}  // namespace isovolc

#endif
