#pragma once

#include <stdexcept>
#include <string>

namespace otelbaev {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

/// The defining equation of d (or d_hat) could not be bracketed below the cap.
class BracketFailure : public Error {
public:
    using Error::Error;
};

/// A seeded extremal sweep left the corridor and diverged.
class BlowUp : public Error {
public:
    BlowUp(const std::string& what, double x) : Error(what), x(x) {}
    double x;
};

class StiffnessLimit : public Error {
public:
    using Error::Error;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class WindowOutOfRange : public Error {
public:
    using Error::Error;
};

class Unavailable : public Error {
public:
    using Error::Error;
};

class NotReached : public Error {
public:
    using Error::Error;
};

class PoleAt : public Error {
public:
    explicit PoleAt(double x) : Error("pole of the general Riccati solution at x=" + std::to_string(x)), x(x) {}
    double x;
};

}  // namespace otelbaev
