#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixsel {

/// A matrix that should be positive definite is not (Cholesky pivot <= 0).
/// Callers typically respond by regularizing the covariance.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every component density underflowed for some observation; the model is
/// pathologically far from the data.
struct DegenerateDensity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A responsibility column carries too little mass to estimate a covariance.
/// Signals the caller to prune the component.
struct EmptyComponent : std::runtime_error {
    EmptyComponent(int component, const std::string& what)
        : std::runtime_error(what), component(component) {}
    int component;
};

/// The closed-form weight update denominator 1 - M*lambda*D_f is nonpositive.
struct LambdaTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A T_m denominator of the SCAD weight update is nonpositive.
struct NonpositiveDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AllComponentsPruned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested initial component count violates the M <= n/d rule.
struct InitTooManyComponents : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooManyClusters : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CountMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CSV parse failure; row and column are 1-based.
struct ParseError : std::runtime_error {
    ParseError(std::size_t row, std::size_t column, const std::string& what)
        : std::runtime_error(what), row(row), column(column) {}
    std::size_t row;
    std::size_t column;
};

struct EmptyFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mixsel
