#pragma once

#include <stdexcept>
#include <string>

namespace phi4ion {

/// Bad or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver failed to converge (CLI exit code 3).
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Base for physics-domain failures (CLI exit code 4).
struct PhysicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mean-field mass squared driven to or below the stability floor.
struct GaplessError : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Parameters beyond the linear-to-zigzag transition.
struct InstabilityError : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Laser beatnote inside the resonance guard band of a phonon mode.
struct ResonanceError : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Effective mass squared non-positive: detuning beyond the soft mode.
struct SoftModeError : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Propagator evaluated at or past its pole.
struct PoleError : PhysicsError {
    using PhysicsError::PhysicsError;
};

}  // namespace phi4ion
