#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hvis {

enum class ErrorCode {
    EmptyMask,
    EmptyInput,
    DimensionMismatch,
    BothEmpty,
    InvalidDims,
    OutOfRange,
    MaskOutOfBounds,
    GridMismatch,
    NoPositives,
    NonFinite,
    LabelOutOfRange,
    EmptyBatch,
    NotInitialized,
    EmptyGroundTruth,
    EmptyDataset,
    ParseError,
    SchemaError,
    InconsistentIds,
    IoError,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hvis
