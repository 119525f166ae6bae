#pragma once

#include <stdexcept>
#include <string>

namespace cfl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidGridError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct DegenerateMetricError : Error { using Error::Error; };
struct KTooLargeError : Error { using Error::Error; };
struct ConfigurationError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct IncompleteRunError : Error { using Error::Error; };

// Time stepper could not proceed; carries the diagnostic dump in what().
struct StiffnessError : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };
struct VersionError : IoError { using IoError::IoError; };

} // namespace cfl
