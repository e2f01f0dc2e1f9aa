#pragma once

#include <stdexcept>
#include <string>

namespace fbl {

// Thrown when a queueing/power model is void at the requested operating
// point (e.g. arrival rate exceeds the mean service rate).
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a numerical evaluation produced a non-finite value that the
// caller must not silently consume.
struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fbl
