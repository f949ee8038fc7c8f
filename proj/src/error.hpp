#pragma once

#include <stdexcept>
#include <string>

namespace bpop {

enum class Errc {
    invalid_argument,
    io,
    schema,
    cycle,
    unknown_action,
    too_large,
    target_unreachable,
    empty,
    catalog_mismatch,
    registry_gap,
    internal,
};

// Single exception type for the whole library; the C boundary maps
// Errc to status codes.
struct Error : std::runtime_error {
    Errc code;
    Error(Errc c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

} // namespace bpop
