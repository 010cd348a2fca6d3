#pragma once

#include <stdexcept>
#include <string>

namespace kbound {

enum class ErrorKind {
    invalid_argument,  // precondition violated by caller input
    geometry,          // loop/strip construction failed (non-regular, collision, delta too large)
    excluded,          // parameter hits a puncture
    budget,            // enumeration or size budget exceeded
    config,            // configuration file rejected
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace kbound
