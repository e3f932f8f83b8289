#pragma once

#include <stdexcept>
#include <string>

namespace wpflow {

// Base class for recoverable solver failures.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Right-hand side of a zero-mean solve has a mean beyond tolerance.
struct NonZeroMeanError : SolverError {
    using SolverError::SolverError;
};

// An iterative procedure hit its iteration cap before reaching tolerance.
struct NoConvergenceError : SolverError {
    using SolverError::SolverError;
};

// Requested area level is at or below the estimated minimal area.
struct InfeasibleBetaError : SolverError {
    using SolverError::SolverError;
};

// Perturbation direction is zero or fails the zero-mean requirement.
struct ZeroDirectionError : SolverError {
    using SolverError::SolverError;
};

// The chemical potential is (numerically) constant: the two constraint
// gradients are linearly dependent and no area correction direction exists.
struct DegenerateDirectionError : SolverError {
    using SolverError::SolverError;
};

// Backtracking produced no acceptable step above the minimal step size.
struct LineSearchStallError : SolverError {
    using SolverError::SolverError;
};

// Input handed to the retraction is too far from the constraint manifold.
struct OutsideTrustRegionError : SolverError {
    using SolverError::SolverError;
};

// Initial state violates the constraints it is supposed to satisfy.
struct InfeasibleInitialError : SolverError {
    using SolverError::SolverError;
};

}  // namespace wpflow
