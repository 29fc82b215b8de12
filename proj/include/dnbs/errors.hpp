#pragma once

#include <stdexcept>
#include <string>

namespace dnbs {

/// Bad shapes, out-of-range boxes, malformed configuration values.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A candidate basis lies (numerically) in the span of the current subspace.
class LinearDependence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gram system or recursion denominators collapsed beyond tolerance.
class NumericDegeneracy : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text parse failure; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace dnbs
