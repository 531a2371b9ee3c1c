#pragma once

#include <stdexcept>
#include <string>

namespace grounder {

// Base class for every error this library raises deliberately. Catching
// grounder::Error at a boundary is always safe; more specific types below
// let callers decide whether to degrade, retry, or abort.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- core ---

class OutOfRange : public Error {
public:
    using Error::Error;
};

class NoCoordinateFound : public Error {
public:
    using Error::Error;
};

// --- gateway ---

class GatewayError : public Error {
public:
    using Error::Error;
};

class Timeout : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class TransportError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

// A well-formed error response from the endpoint itself. Never retried.
class EndpointError : public GatewayError {
public:
    EndpointError(int status, std::string body)
        : GatewayError("endpoint returned status " + std::to_string(status)),
          status_(status),
          body_(std::move(body)) {}
    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

class ImageEncodingError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

// Raised by the scripted gateway when a call has no scripted entry.
// Lookups outside the script fail loudly; scripts have no silent defaults.
class ScriptExhausted : public GatewayError {
public:
    using GatewayError::GatewayError;
};

// --- ensemble / orchestrator ---

class AllSpecialistsFailed : public Error {
public:
    using Error::Error;
};

class DecisionParseError : public Error {
public:
    using Error::Error;
};

class EpisodeFailed : public Error {
public:
    using Error::Error;
};

// --- harness ---

class FileNotFound : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    SchemaError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// --- cli ---

class ConfigParseError : public Error {
public:
    ConfigParseError(std::string field_path, const std::string& what)
        : Error(field_path + ": " + what), field_path_(std::move(field_path)) {}
    const std::string& field_path() const { return field_path_; }

private:
    std::string field_path_;
};

class TraceIncomplete : public Error {
public:
    using Error::Error;
};

class ReplayDivergence : public Error {
public:
    using Error::Error;
};

}  // namespace grounder
