#include "hvis/error.hpp"

namespace hvis {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::BothEmpty: return "BothEmpty";
        case ErrorCode::InvalidDims: return "InvalidDims";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::MaskOutOfBounds: return "MaskOutOfBounds";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NoPositives: return "NoPositives";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::NotInitialized: return "NotInitialized";
        case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::InconsistentIds: return "InconsistentIds";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace hvis
