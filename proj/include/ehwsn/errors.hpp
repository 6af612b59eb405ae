#pragma once

#include <stdexcept>
#include <string>

namespace ehwsn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid numeric argument (negative rate, capacity below one, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input; message carries the location.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Routing graph has a cycle, so no topological order exists.
class CyclicRoutingError : public Error {
public:
    using Error::Error;
};

/// No connected deployment was found within the retry budget.
class DisconnectedNetworkError : public Error {
public:
    using Error::Error;
};

/// The analytic upper bracket failed to enclose the root of f(alpha).
class BracketFailureError : public Error {
public:
    using Error::Error;
};

/// All generation rates are zero; allocation is undefined.
class NoTrafficError : public Error {
public:
    using Error::Error;
};

/// A storage capacity rounded below one energy packet.
class InvalidCapacityError : public Error {
public:
    using Error::Error;
};

} // namespace ehwsn
