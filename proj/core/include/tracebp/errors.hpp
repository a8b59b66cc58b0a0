#pragma once

#include <stdexcept>
#include <string>

namespace tracebp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normalization was asked of an all-zero mass vector. Signals numerical
/// collapse somewhere upstream of the caller.
class ZeroMassError : public Error {
public:
    using Error::Error;
};

/// A precondition on probability inputs was violated (e.g. an unnormalized
/// distribution where a normalized one is required).
class ContractError : public Error {
public:
    using Error::Error;
};

/// The observed trace length cannot be reached under the configured drift
/// bound; the caller should enlarge the bound or discard the trace.
class UnreachableTerminal : public Error {
public:
    using Error::Error;
};

/// Forward/backward mass underflowed to zero at some stage. Usually means
/// the drift bound is too small for the trace, or the trace is inconsistent.
class DecodeCollapse : public Error {
public:
    using Error::Error;
};

/// An exact-reference computation was requested on an instance outside the
/// enforced size budget.
class InstanceTooLarge : public Error {
public:
    using Error::Error;
};

/// Cluster file block count does not match the centers file line count.
class MismatchedCounts : public Error {
public:
    using Error::Error;
};

/// A cluster block contained no reads.
class EmptyCluster : public Error {
public:
    using Error::Error;
};

} // namespace tracebp
