#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "coopdec/codes.hpp"

namespace coopdec {

struct AlistParseError : std::runtime_error {
    int line;
    AlistParseError(int line_, const std::string& what_)
        : std::runtime_error("alist line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

// Standard AList text format. Both the zero-padded and the unpadded entry
// variants are accepted on read; writing always pads.
ParityCheckMatrix alist_read(std::istream& in);
ParityCheckMatrix alist_read(const std::string& text);
std::string alist_write(const ParityCheckMatrix& h);

ParityCheckMatrix alist_load(const std::string& path);
void alist_save(const std::string& path, const ParityCheckMatrix& h);

} // namespace coopdec
