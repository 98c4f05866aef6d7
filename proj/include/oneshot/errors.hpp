#pragma once

#include <stdexcept>
#include <string>

namespace oneshot {

// Error taxonomy mirrored by the CLI exit codes: validation (and its
// subtypes) -> 2, resource -> 3, io -> 4.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameters, mismatched alphabets, malformed or unnormalized inputs.
struct validation_error : error {
    using error::error;
};

// Supp(P) not contained in Supp(Q) where a divergence requires it.
struct support_error : validation_error {
    using validation_error::validation_error;
};

// A computation would exceed the configured memory budget.
struct resource_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

} // namespace oneshot
