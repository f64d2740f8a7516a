#ifndef SIGDEX_ERROR_HPP
#define SIGDEX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sigdex {

enum class Errc { invalid_input, capacity_exhausted, format_error, internal_error };

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::invalid_input: return "invalid-input";
        case Errc::capacity_exhausted: return "capacity-exhausted";
        case Errc::format_error: return "format-error";
        case Errc::internal_error: return "internal-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

// Checked in every build type; these guard the algorithmic invariants.
inline void check(bool cond, const char* what) {
    if (!cond) fail(Errc::internal_error, what);
}

}  // namespace sigdex

#endif
