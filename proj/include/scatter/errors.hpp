#pragma once

#include <stdexcept>
#include <string>

namespace scatter {

// Base class for all failures raised by the library. Subclasses distinguish
// validation problems, solvability obstructions and iteration breakdowns so
// callers (in particular the command line tool) can map them to exit codes.
class ScatterError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed potential, inconsistent grid, unreadable table.
class ValidationError : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// The denominator function D(q) has a (near) zero on the real half line.
class ZeroDenominator : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// The nonvanishing condition for unique solvability fails on a requested
// shell: |D(q)| is below the guard threshold there.
class Condition7Violation : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// The symbol curve of the singular integral equation passes through the
// origin, so the winding number and hence the solvability class is undefined.
class OriginHit : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// The symbol curve turns by more than a quarter circle between neighbouring
// samples; the winding number cannot be trusted on this grid.
class UnderResolved : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// Negative winding number or an origin hit: the inverse problem is not
// uniquely solvable from the supplied data.
class ConditionsViolated : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// An iterative solver ran out of iterations before reaching its tolerance.
class NonConvergence : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// The fixed point map has estimated Lipschitz factor >= 1 above the chosen
// threshold, so the iteration carries no contraction guarantee.
class NotContractive : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// A recovered spectral density changes sign, so no single real coupling
// constant is consistent with it.
class SignInconsistent : public ScatterError {
public:
    using ScatterError::ScatterError;
};

// The recovered spectral density vanishes identically; there is no potential
// to reconstruct.
class NoPotential : public ScatterError {
public:
    using ScatterError::ScatterError;
};

} // namespace scatter
