#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rw {

// Evaluation exactly at an atom where the kernel/integral is undefined.
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested integral/log-measure is provably infinite.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// mass_fraction with a zero denominator.
struct UndefinedFractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An atom has no good scale within the allowed dyadic budget.
struct InsufficientScalesError : std::runtime_error {
    InsufficientScalesError(const std::string& what, std::size_t atom)
        : std::runtime_error(what), atom_index(atom) {}
    std::size_t atom_index;
};

// A construction step could not complete (cap exceeded, empty children, ...).
struct ConstructionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rw
