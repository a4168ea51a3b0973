#pragma once

#include <stdexcept>
#include <string>

namespace sscat {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// I/O and parsing
struct IoError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
// Timestamp regression in a stream that must be time-ordered.
struct OrderError : Error {
    using Error::Error;
};

// Grid capacity violations. Overflow is a hard error by default: points are
// never silently sampled away.
struct PillarOverflowError : Error {
    using Error::Error;
};
struct ActivePillarOverflowError : Error {
    using Error::Error;
};

// Convolution layer misuse
struct ShapeMismatchError : Error {
    using Error::Error;
};
struct StateUninitializedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Oracle comparison exceeded tolerance or found a change-map soundness hole.
struct VerificationError : Error {
    using Error::Error;
};

}  // namespace sscat
