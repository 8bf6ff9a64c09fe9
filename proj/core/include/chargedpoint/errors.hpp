#pragma once

#include <stdexcept>
#include <string>

namespace chargedpoint {

// Parameter containers disagree in group names, order, or shapes.
struct StructuralMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A scalar argument is outside its documented domain.
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation produced non-finite values or failed to converge.
struct NumericalFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A data file does not match its declared binary layout.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required dataset file is absent and no fallback was enabled.
struct DatasetNotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An output file could not be created or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested threshold is undefined for the given input (e.g. no positive
// curvature direction exists).
struct UndefinedThresholdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace chargedpoint
