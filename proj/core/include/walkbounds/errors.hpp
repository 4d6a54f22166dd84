#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace walkbounds {

/// Root of the library's exception hierarchy. `kind()` is a stable
/// kebab-case tag used for machine-parsable error lines (`error:<kind>:`).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Rejected input: malformed documents, bad matrices, bad partitions,
/// out-of-contract arguments. Maps to CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Structural or numerical failure inside a solver. Maps to CLI exit code 3.
class SolverError : public Error {
public:
    using Error::Error;
};

class RowSumError final : public ValidationError {
public:
    explicit RowSumError(const std::string& m) : ValidationError("row-sum", m) {}
};

class NegativeEntryError final : public ValidationError {
public:
    explicit NegativeEntryError(const std::string& m) : ValidationError("negative-entry", m) {}
};

class DuplicateStateError final : public ValidationError {
public:
    explicit DuplicateStateError(const std::string& m) : ValidationError("duplicate-state", m) {}
};

class MissingStateError final : public ValidationError {
public:
    explicit MissingStateError(const std::string& m) : ValidationError("missing-state", m) {}
};

class EmptyClassError final : public ValidationError {
public:
    explicit EmptyClassError(const std::string& m) : ValidationError("empty-class", m) {}
};

class UnknownStateError final : public ValidationError {
public:
    explicit UnknownStateError(const std::string& m) : ValidationError("unknown-state", m) {}
};

/// A state assigned to more than one partition class.
class DuplicateLabelError final : public ValidationError {
public:
    explicit DuplicateLabelError(const std::string& m) : ValidationError("duplicate-label", m) {}
};

class PartitionClassError final : public ValidationError {
public:
    explicit PartitionClassError(const std::string& m) : ValidationError("partition-class", m) {}
};

class SubsetError final : public ValidationError {
public:
    explicit SubsetError(const std::string& m) : ValidationError("subset", m) {}
};

class CapExceededError final : public ValidationError {
public:
    explicit CapExceededError(const std::string& m) : ValidationError("cap-exceeded", m) {}
};

class GeometryError final : public ValidationError {
public:
    explicit GeometryError(const std::string& m) : ValidationError("geometry", m) {}
};

class RetriesExhaustedError final : public ValidationError {
public:
    explicit RetriesExhaustedError(const std::string& m) : ValidationError("retries-exhausted", m) {}
};

class ParseError final : public ValidationError {
public:
    explicit ParseError(const std::string& m) : ValidationError("parse", m) {}
};

class IoError final : public ValidationError {
public:
    explicit IoError(const std::string& m) : ValidationError("io", m) {}
};

/// Some A/B state has no support path to C; absorption-dependent
/// quantities are undefined on such inputs.
class AbsorptionError final : public ValidationError {
public:
    explicit AbsorptionError(const std::string& m) : ValidationError("absorption", m) {}
};

class InvalidArgumentError final : public ValidationError {
public:
    explicit InvalidArgumentError(const std::string& m) : ValidationError("invalid-argument", m) {}
};

/// The visit-count series diverges on the requested domain (some state
/// cannot leave it).
class DivergentDomainError final : public SolverError {
public:
    explicit DivergentDomainError(const std::string& m) : SolverError("divergent-domain", m) {}
};

class SolveError final : public SolverError {
public:
    explicit SolveError(const std::string& m) : SolverError("solve", m) {}
};

}  // namespace walkbounds
