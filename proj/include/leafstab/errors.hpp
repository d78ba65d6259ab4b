#pragma once

#include <stdexcept>
#include <string>

namespace leafstab {

// Base class for everything thrown by the library. The CLI maps these to
// exit codes, so keep the taxonomy flat and the messages self-contained.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- chart / geometry --------------------------------------------------------

class InvalidChartPoint : public Error {
public:
    using Error::Error;
};

class TransitionUndefined : public Error {
public:
    using Error::Error;
};

class SingularMetric : public Error {
public:
    using Error::Error;
};

// -- constrained stability ---------------------------------------------------

class RankDeficient : public Error {
public:
    using Error::Error;
};

class BasisNotTangent : public Error {
public:
    using Error::Error;
};

// Raised when the Sylvester-minor test and the eigenvalue test disagree about
// definiteness. Never resolved silently; the caller decides what to do.
class NumericalAmbiguity : public Error {
public:
    using Error::Error;
};

// -- model -------------------------------------------------------------------

class InvalidParams : public Error {
public:
    using Error::Error;
};

class ZeroSpin : public Error {
public:
    using Error::Error;
};

class AsymmetricParams : public Error {
public:
    using Error::Error;
};

// -- integration -------------------------------------------------------------

class StepSizeUnderflow : public Error {
public:
    using Error::Error;
};

class MaxStepsExceeded : public Error {
public:
    using Error::Error;
};

class ProjectionFailed : public Error {
public:
    using Error::Error;
};

// -- configuration -----------------------------------------------------------

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace leafstab
