#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmobo {

enum class ErrorKind {
    Range,           // parameter outside its declared range
    Domain,          // mathematical precondition violated
    Protocol,        // wrong trial count, design mismatch, bad pick count
    InvalidSelection,
    InsufficientData,
    Numerical,
    ProtocolComplete,
    Mode,
    Sequencing,
    Stage,
    Validation,
    Config,
    CorruptLog,
    EmptyData,
    NotFound,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hmobo
