#include "cadence/error.hpp"

namespace cadence {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::EmptyRecording: return "EmptyRecording";
        case ErrorKind::NonFiniteSample: return "NonFiniteSample";
        case ErrorKind::UnknownLayout: return "UnknownLayout";
        case ErrorKind::RecordParse: return "RecordParse";
        case ErrorKind::MissingColumns: return "MissingColumns";
        case ErrorKind::Io: return "Io";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::WrongPairCount: return "WrongPairCount";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::NonFiniteActivation: return "NonFiniteActivation";
        case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
        case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
        case ErrorKind::DivergedLoss: return "DivergedLoss";
        case ErrorKind::VersionMismatch: return "VersionMismatch";
        case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorKind::MissingClass: return "MissingClass";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::NonFiniteFeature: return "NonFiniteFeature";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::OutOfBounds: return "OutOfBounds";
        case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

}  // namespace cadence
