#pragma once

#include <stdexcept>
#include <string>

namespace stemvine {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Incompatible or empty matrix/vector shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Invalid scalar/size argument (out of its documented domain).
class ParamError : public Error {
public:
    using Error::Error;
};

// Iterative solver failed to converge; carries the last estimate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_estimate)
        : Error(what), last_estimate(last_estimate) {}
    double last_estimate;
};

// Instance too large for an exhaustive algorithm.
class SizeError : public Error {
public:
    using Error::Error;
};

// Class label outside {1..k}.
class LabelError : public Error {
public:
    using Error::Error;
};

// Forward evaluation failure (unbound slot, etc.).
class EvalError : public Error {
public:
    using Error::Error;
};

// Architecture template construction failure.
class TemplateError : public Error {
public:
    using Error::Error;
};

// Text format error; carries 1-based line and column.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}
    std::size_t line;
    std::size_t column;
};

// Structurally well-formed input that violates network invariants.
class SemanticError : public Error {
public:
    using Error::Error;
};

// A bound weight exceeds its declared norm profile; certification refused.
class ProfileViolation : public Error {
public:
    using Error::Error;
};

// Training diverged or the network is outside the trainer's supported shape.
class TrainError : public Error {
public:
    using Error::Error;
};

// Operation cannot handle the given nonlinearity/configuration.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// File read/write failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace stemvine
