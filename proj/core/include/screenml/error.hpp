#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace screenml {

enum class ErrorCode {
  // dataset
  HeaderMismatch,
  RaggedRow,
  ParseError,
  InvalidSchema,
  // features
  EmptyDataset,
  SchemaMismatch,
  UnknownColumn,
  MissingDepartmentColumn,
  SingleClass,
  InvalidConfig,
  // models
  EmptyInput,
  DimensionMismatch,
  UnknownFormatVersion,
  // imbalance
  TooFewMinority,
  InvalidRatio,
  // ensemble
  EmptyModelList,
  TooFewRows,
  // eval
  LengthMismatch,
  EmptyGrid,
  TooFewPerClass,
  // io
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::MissingDepartmentColumn: return "MissingDepartmentColumn";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownFormatVersion: return "UnknownFormatVersion";
    case ErrorCode::TooFewMinority: return "TooFewMinority";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::EmptyModelList: return "EmptyModelList";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::TooFewPerClass: return "TooFewPerClass";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace screenml
