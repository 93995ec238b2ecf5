#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uqeval {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed JSON input; carries the 1-based line number.
struct ParseError : Error {
    ParseError(std::size_t line_no, const std::string& what_arg)
        : Error("line " + std::to_string(line_no) + ": " + what_arg), line(line_no) {}
    std::size_t line;
};

/// A mandatory field is missing or has the wrong type.
struct SchemaError : Error {
    SchemaError(std::string field_name, const std::string& what_arg)
        : Error(what_arg), field(std::move(field_name)) {}
    std::string field;
};

/// Duplicate record id within one dataset.
struct DuplicateIdError : Error {
    DuplicateIdError(std::string record_id)
        : Error("duplicate record id: " + record_id), id(std::move(record_id)) {}
    std::string id;
};

/// A parsed value violates a data-model invariant (e.g. positive logprob).
struct InvariantError : Error {
    using Error::Error;
};

/// Lookup of a missing key (e.g. external metric absent from a record).
struct LookupError : Error {
    using Error::Error;
};

/// Caller violated an operation precondition (empty references, dimension mismatch, ...).
struct ContractError : Error {
    using Error::Error;
};

/// An estimator cannot be computed for this record (e.g. token entropies absent).
struct EstimatorUnavailableError : Error {
    using Error::Error;
};

/// A statistic is undefined on this input (single-class AUROC, constant-vector Spearman).
struct UndefinedStatError : Error {
    using Error::Error;
};

/// Judge endpoint unreachable after all retries.
struct TransportError : Error {
    using Error::Error;
};

/// Judge reply could not be mapped to a binary verdict; carries the raw reply.
struct VerdictParseError : Error {
    VerdictParseError(std::string reply, const std::string& what_arg)
        : Error(what_arg), raw_reply(std::move(reply)) {}
    std::string raw_reply;
};

/// Simulator rate targets admit no flip probabilities in [0,1].
struct CalibrationError : Error {
    using Error::Error;
};

/// Probe training cannot proceed (single-class labels, non-finite features).
struct TrainingError : Error {
    using Error::Error;
};

/// Bad run configuration (unknown method/metric id, unreadable file, ...).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace uqeval
