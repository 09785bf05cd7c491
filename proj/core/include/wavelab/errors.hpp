#pragma once

#include <stdexcept>
#include <string>

namespace wavelab {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg, std::string field_ = "")
        : Error(msg), field(std::move(field_)) {}
    std::string field;
};

struct OutOfDomain : Error {
    using Error::Error;
};

struct ZeroCovector : Error {
    ZeroCovector() : Error("covector is the zero section") {}
};

struct TangentialIncidence : Error {
    using Error::Error;
};

struct NotSpacelike : Error {
    using Error::Error;
};

struct PulseClipped : Error {
    using Error::Error;
};

struct BlowUp : Error {
    BlowUp(int step_, double amplitude_)
        : Error("solution exceeded the blow-up cap at step " + std::to_string(step_)),
          step(step_), amplitude(amplitude_) {}
    int step;
    double amplitude;
};

struct NoContraction : Error {
    using Error::Error;
};

struct NoIntersection : Error {
    using Error::Error;
};

struct EmptyTube : Error {
    using Error::Error;
};

struct DegenerateReference : Error {
    using Error::Error;
};

struct UnderResolved : Error {
    using Error::Error;
};

// Snapshot file errors.
struct BadMagic : Error {
    using Error::Error;
};
struct HeaderMismatch : Error {
    using Error::Error;
};
struct TruncatedPayload : Error {
    using Error::Error;
};

}  // namespace wavelab
