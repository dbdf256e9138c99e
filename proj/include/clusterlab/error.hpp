#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clab {

enum class ErrorKind {
    InvalidInput,
    FormatError,
    NumericalFailure,
    DegenerateInput,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind lets
/// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorKind::InvalidInput, what);
}

}  // namespace clab
