#pragma once

#include <stdexcept>
#include <string>

namespace randmaps {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// enumeration would exceed the configured size limit
struct CapExceededError : Error {
    explicit CapExceededError(const std::string& what) : Error(what) {}
};

// contour/label coding violates an invariant; `index` is the first offending position
struct MalformedCodingError : Error {
    MalformedCodingError(const std::string& what, std::int64_t index_)
        : Error(what + " (at index " + std::to_string(index_) + ")"), index(index_) {}
    std::int64_t index;
};

// conditioned sampler exhausted its attempt budget
struct RejectionBudgetError : Error {
    RejectionBudgetError(const std::string& what, std::int64_t attempts_, double rate_)
        : Error(what + " after " + std::to_string(attempts_) +
                " attempts (observed acceptance rate " + std::to_string(rate_) + ")"),
          attempts(attempts_),
          observed_rate(rate_) {}
    std::int64_t attempts;
    double observed_rate;
};

#define RM_CHECK(cond, msg)                                             \
    do {                                                                \
        if (!(cond)) throw ::randmaps::Error(std::string("internal: ") + (msg)); \
    } while (0)

}  // namespace randmaps
