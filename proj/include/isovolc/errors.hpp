#ifndef ISOVOLC_ERRORS_HPP
#define ISOVOLC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isovolc {

// Every domain failure carries the originating module and a stable machine
// code so the CLI can surface structured errors.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string code, const std::string& msg)
        : std::runtime_error(module + "/" + code + ": " + msg),
          module_(std::move(module)), code_(std::move(code)) {}

    const std::string& module() const { return module_; }
    const std::string& code() const { return code_; }

private:
    std::string module_, code_;
};

inline Error err(const char* module, const char* code, const std::string& msg) {
    return Error(module, code, msg);
}

// Unfactored cofactor is reported as a decimal string so callers can retry
// with hints.
class FactorizationIncomplete : public Error {
public:
    FactorizationIncomplete(std::string cofactor_dec)
        : Error("maximalization", "FactorizationIncomplete",
                "unfactored cofactor " + cofactor_dec),
          cofactor(std::move(cofactor_dec)) {}
    std::string cofactor;
};

}  // namespace isovolc

#endif
