#pragma once

#include <stdexcept>
#include <string>

namespace hac {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration problems: bad keys, bad values, inconsistent setup.
struct ConfigError : Error {
    using Error::Error;
};

// Simulation entered a state outside the model's validity (e.g. v_dc <= 0).
struct NonPhysicalState : Error {
    using Error::Error;
};

// A right-hand side produced NaN/Inf.
struct NonFiniteDerivative : Error {
    using Error::Error;
};

// Grid voltage magnitude too small for angle extraction.
struct DegenerateGridVoltage : Error {
    using Error::Error;
};

// Requested modulation magnitude exceeds the linear range.
struct ModulationOverflow : Error {
    using Error::Error;
};

// R^2 + (L*omega)^2 vanished; no steady-state current solution.
struct DegenerateImpedance : Error {
    using Error::Error;
};

// Parameters make a formula undefined (division by zero etc.).
struct DegenerateParams : Error {
    using Error::Error;
};

// Iterative solver failed to converge.
struct NoConvergence : Error {
    using Error::Error;
};

// Operation needs a non-empty trajectory log.
struct EmptyLog : Error {
    using Error::Error;
};

}  // namespace hac
