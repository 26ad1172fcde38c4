#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace firesim {

enum class ErrorCode {
  SpecMismatch,
  NonFinite,
  BadRange,
  InvalidGrid,
  InvalidParams,
  NegativeFuel,
  TooFewFrames,
  EmptyVector,
  CflViolation,
  FitDiverged,
  UnknownKind,
  NoPositives,
  GridTooSmall,
  BadMagic,
  NonBinaryPixel,
  TruncatedPayload,
  SpecMismatchAcrossFrames,
  MissingManifest,
  MissingComponent,
  WindFrameCountMismatch,
  EmptyInput,
  BadConfig,
  Io,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NegativeFuel: return "NegativeFuel";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::NonBinaryPixel: return "NonBinaryPixel";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::SpecMismatchAcrossFrames: return "SpecMismatchAcrossFrames";
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::MissingComponent: return "MissingComponent";
    case ErrorCode::WindFrameCountMismatch: return "WindFrameCountMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. The code is stable and its name is what
/// crosses language boundaries; the message is free-form context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace firesim
