#pragma once

#include <stdexcept>
#include <string>

namespace protoseq {

// Precondition violated by caller-supplied data.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameter search exhausted its grid without a feasible point.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exhaustive enumeration refused because the state count exceeds the cap.
class CapExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw InputError(what);
}

} // namespace protoseq
