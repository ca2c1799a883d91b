#pragma once

#include <stdexcept>
#include <string>

namespace thetaobs {

// Bad caller input: dimension mismatches, invalid types, malformed files.
struct input_error : std::runtime_error {
    explicit input_error(const std::string &what) : std::runtime_error(what) {}
};

// The request is well-formed but exceeds a documented size limit.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string &what)
        : std::runtime_error(what)
    {
    }
};

// Internal soundness alarm: a condition that is mathematically guaranteed
// failed to hold.  Must never fire; if it does, the implementation is wrong.
struct soundness_error : std::logic_error {
    explicit soundness_error(const std::string &what) : std::logic_error(what)
    {
    }
};

} // namespace thetaobs
