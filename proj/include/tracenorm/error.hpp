#pragma once

#include <stdexcept>
#include <string>

namespace tracenorm {

/// Broad failure categories; the CLI maps them onto exit codes.
enum class ErrorKind {
    invalid_input, ///< precondition on user-supplied data violated
    unsupported,   ///< operation not available for this configuration
    numerical,     ///< factorization, solve or quadrature failure
    divergence,    ///< integral does not converge (function outside the space)
};

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what)
        , m_kind(kind)
    {}

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what)
{
    if (!condition) fail(kind, what);
}

} // namespace tracenorm
