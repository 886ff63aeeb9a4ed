#pragma once
// Error taxonomy shared across the library.

#include <stdexcept>
#include <string>

namespace dcmd {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Text parse failure with source position.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column, std::string expected = "")
        : Error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column) +
                (expected.empty() ? "" : " (expected " + expected + ")")),
          line(line), column(column), expected(std::move(expected)) {}
    int line;
    int column;
    std::string expected;
};

// Schema construction/resolution failure (duplicate type, unknown parent, cycle).
class SchemaError : public Error {
public:
    SchemaError(const std::string& msg, std::string type_name = "")
        : Error(msg), type_name(std::move(type_name)) {}
    std::string type_name;
};

// Rejected store operation; the store is left unchanged.
class StoreError : public Error {
public:
    enum class Kind {
        unknown_type,
        unowned_attribute,
        value_kind_mismatch,
        illegal_role_player,
        dangling_reference,
        unknown_attribute,
        unknown_role,
        bad_pattern,
    };
    StoreError(Kind kind, const std::string& msg) : Error(msg), kind(kind) {}
    Kind kind;
};

// Binary stream rejected at a byte offset.
class DecodeError : public Error {
public:
    DecodeError(const std::string& msg, size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset(offset) {}
    size_t offset;
};

class InferenceError : public Error {
public:
    using Error::Error;
};

// Evidence assigns zero probability mass to every joint state.
class ImpossibleEvidenceError : public InferenceError {
public:
    using InferenceError::InferenceError;
};

class JointTooLargeError : public InferenceError {
public:
    using InferenceError::InferenceError;
};

// Scenario or configuration content failed validation; message carries the field path.
class ValidationError : public Error {
public:
    using Error::Error;
};

class BusClosedError : public Error {
public:
    using Error::Error;
};

// Detection class with no general-class document in the a-priori set.
class UnknownClassError : public Error {
public:
    using Error::Error;
};

}  // namespace dcmd
