#pragma once

#include <stdexcept>
#include <string>

namespace apollo {

// Exit-code classes used by the command line front end.
enum class ErrorClass { config = 1, math = 2, io = 3 };

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual ErrorClass error_class() const { return ErrorClass::math; }
};

class NormalizationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    using Error::Error;
};

class InvariantError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

// Store cutoff does not cover the requested counting range.
class CutoffError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

// Root bracketing failed.
class RangeError : public Error {
public:
    using Error::Error;
};

class AccuracyError : public Error {
public:
    AccuracyError(const std::string& msg, double achieved)
        : Error(msg), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

class ConfigError : public Error {
public:
    using Error::Error;
    ErrorClass error_class() const override { return ErrorClass::config; }
};

class IoError : public Error {
public:
    using Error::Error;
    ErrorClass error_class() const override { return ErrorClass::io; }
};

enum class FormatErrorKind { bad_magic, version_mismatch, fingerprint_mismatch, truncated, mode_mismatch };

class FormatError : public IoError {
public:
    FormatError(FormatErrorKind kind, const std::string& msg) : IoError(msg), kind_(kind) {}
    FormatErrorKind kind() const { return kind_; }

private:
    FormatErrorKind kind_;
};

}  // namespace apollo
