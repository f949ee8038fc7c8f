#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "error.hpp"

namespace bpop {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(Errc::io, "read failure on '" + path + "'");
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) fail(Errc::io, "write failure on '" + path + "'");
}

} // namespace bpop
