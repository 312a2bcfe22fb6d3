#pragma once

#include <stdexcept>
#include <string>

namespace rdinv {

/// Per-step Newton solve did not reach tolerance within the iteration cap;
/// signals a too-large step or an incipient blow-up regime.
class NewtonDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field magnitude exceeded the configured cap during a forward solve.
class BlowUp : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A stencil or derivative extraction needs more grid points than supplied.
class GridTooCoarse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed-form eigenpairs exist only for constant coefficients and the
/// supported endpoint patterns.
class UnsupportedBC : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Least-squares design matrix has unsupported (all-zero) columns and no
/// ridge term to absorb them.
class RankDeficient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Smoothing system has more degrees of freedom than data and no penalty.
class IllConditioned : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data spread is too small to define an observable range.
class DegenerateRange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Interaction multiplier is zero, so the corresponding unknown is not
/// identifiable.
class ZeroMultiplier : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dissipativity-based bound was requested for non-decreasing reactions.
class NotDissipative : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration file is malformed, fails schema validation, or names
/// unknown keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Wraps BlowUp / NewtonDivergence raised inside an inversion iteration.
class ForwardFailure : public std::runtime_error {
public:
    ForwardFailure(const std::string& what, bool blow_up)
        : std::runtime_error(what), blow_up(blow_up) {}
    bool blow_up = false;
};

}  // namespace rdinv
