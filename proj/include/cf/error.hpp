#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cf {

enum class ErrorKind {
  Parse,
  UnknownIdentifier,
  IndexOutOfRange,
  UnboundVariable,
  Pole,
  ExponentOverflow,
  DimensionMismatch,
  DegreeCap,
  OverlappingSupport,
  NotLinear,
  UnboundLetter,
  DerivativeOrder,
  RepeatedRoot,
  NonConstantCoefficients,
  InsufficientData,
  InvalidArgument,
  Numeric,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type. what() starts with the
// kind name, e.g. "OverlappingSupport: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t position, const std::string& message)
      : Error(kind, message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::Pole: return "Pole";
    case ErrorKind::ExponentOverflow: return "ExponentOverflow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegreeCap: return "DegreeCap";
    case ErrorKind::OverlappingSupport: return "OverlappingSupport";
    case ErrorKind::NotLinear: return "NotLinear";
    case ErrorKind::UnboundLetter: return "UnboundLetter";
    case ErrorKind::DerivativeOrder: return "DerivativeOrder";
    case ErrorKind::RepeatedRoot: return "RepeatedRoot";
    case ErrorKind::NonConstantCoefficients: return "NonConstantCoefficients";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Numeric: return "NumericError";
  }
  return "Error";
}

}  // namespace cf
