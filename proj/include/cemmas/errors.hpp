#pragma once

#include <stdexcept>

namespace cemmas {

// Instance or oracle asked for more than the implementation is sized for
// (e.g. exact solver beyond its vertex cap).
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Randomized construction ran out of its rejection budget.
struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation requires a matrix structure the argument does not have.
struct not_applicable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An exchange move whose application would not yield a single Hamiltonian cycle.
struct invalid_move_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace cemmas
