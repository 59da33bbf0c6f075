#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace uspread {

// Bad user-supplied data (malformed files, out-of-range parameters).
// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An internal precondition or postcondition failed; indicates a bug or an
// infeasible plan handed to a stage that required feasibility.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Shortest round-trip decimal form of a double (parse gives back the same bits).
inline std::string num_to_string(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace uspread
