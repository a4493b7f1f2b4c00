#pragma once

#include <stdexcept>
#include <string>

namespace gmr {

/// Input value is non-finite or otherwise outside the operation's domain.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A matrix claimed to be a rotation fails the orthonormality/determinant check.
class InvalidRotation : public std::invalid_argument {
public:
    explicit InvalidRotation(const std::string& msg) : std::invalid_argument(msg) {}
};

/// 6D rotation input whose two columns are zero or parallel.
class Degenerate6d : public std::invalid_argument {
public:
    explicit Degenerate6d(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Tensor/sequence dimensions do not agree.
class ShapeMismatch : public std::invalid_argument {
public:
    explicit ShapeMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A computation produced a non-finite or otherwise unusable result
/// (e.g. diverged training loss). Distinct from bad *inputs*.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gmr
