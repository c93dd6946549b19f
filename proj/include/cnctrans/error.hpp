#pragma once

#include <stdexcept>
#include <string>

namespace cnctrans {

/// Failure categories. The CLI maps each category onto a process exit code.
enum class ErrorKind {
    Syntax,          ///< grammar, model or module text does not parse
    Grammar,         ///< grammar description violates its invariants
    Collision,       ///< derivation refused the base grammar
    Compile,         ///< transformation module fails static checks
    MalformedNode,   ///< AST does not conform to its production
    Evaluation,      ///< where-expression failed at run time
    CapExceeded,     ///< loop application cap reached
    StaleMatch,      ///< match refers to nodes no longer in the model
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace cnctrans
