#pragma once

#include <stdexcept>
#include <string>

namespace pwexp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class InvalidBounds : public Error {
public:
    using Error::Error;
};

class EmptyRegion : public Error {
public:
    using Error::Error;
};

class DegenerateGrid : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, int iterations) : Error(what), iterations_(iterations) {}
    int iterations() const { return iterations_; }

private:
    int iterations_;
};

class BranchInversionFailure : public Error {
public:
    BranchInversionFailure(const std::string& what, long branch) : Error(what), branch_(branch) {}
    long branch() const { return branch_; }

private:
    long branch_;
};

class InsufficientSignal : public Error {
public:
    using Error::Error;
};

class NotDecaying : public Error {
public:
    using Error::Error;
};

/// Linear example parameters violating |a| < (|b| - S) / sqrt(S).
class NotAdmissible : public Error {
public:
    NotAdmissible(const std::string& what, double S, double bound) : Error(what), S_(S), bound_(bound) {}
    double S() const { return S_; }
    double bound() const { return bound_; }

private:
    double S_;
    double bound_;
};

/// Malformed configuration; key() names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what) : Error(key + ": " + what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace pwexp
