#pragma once

#include <stdexcept>
#include <string>

namespace cadence {

enum class ErrorKind {
    InvalidArgument,
    EmptyRecording,
    NonFiniteSample,
    UnknownLayout,
    RecordParse,
    MissingColumns,
    Io,
    SchemaMismatch,
    ParameterOutOfRange,
    EmptyDataset,
    WrongPairCount,
    ShapeMismatch,
    NonFiniteActivation,
    NonFiniteGradient,
    InvalidEpsilon,
    DivergedLoss,
    VersionMismatch,
    ChecksumMismatch,
    MissingClass,
    SingleClass,
    NonFiniteFeature,
    ZeroVector,
    OutOfBounds,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures surface as this type; `kind()` lets callers branch
// without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace cadence
