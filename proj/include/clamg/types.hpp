#ifndef CLAMG_TYPES_HPP
#define CLAMG_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace clamg {

/// Block-local index type. Global sizes are capped at 2^31 - 1.
using index_t = std::int32_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-conforming operand shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Raised by solvers that require a symmetric positive definite operator.
class NotSpdError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Worker threads used by row-parallel kernels. Results never depend on it.
void set_num_threads(int n);
int num_threads();

} // namespace clamg

#endif // CLAMG_TYPES_HPP
