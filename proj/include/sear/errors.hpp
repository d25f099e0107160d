#pragma once

#include <stdexcept>
#include <string>

namespace sear {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition on an argument was violated (bad band bounds, non-unit vector, empty key, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input data (file contents, corpus, config) is malformed. Carries an optional 1-based line number.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CorpusError : public FormatError {
public:
    using FormatError::FormatError;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class AttributionError : public Error {
public:
    using Error::Error;
};

class StateError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Dialogue backend failed to produce text.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Non-retryable HTTP status from a chat endpoint.
class RequestError : public GenerationError {
public:
    RequestError(const std::string& what, int status) : GenerationError(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Retries exhausted against a chat endpoint.
class UnavailableError : public GenerationError {
public:
    using GenerationError::GenerationError;
};

/// Target channel closed or otherwise failed.
class InteractionError : public Error {
public:
    using Error::Error;
};

}  // namespace sear
