#pragma once

#include <stdexcept>
#include <string>

namespace maglab {

enum class ErrorKind {
  InvalidSpec,
  EmptyMask,
  ResolutionTooCoarse,
  InvalidParams,
  InvalidArgument,
  NegativeScale,
  NonAdjacent,
  WeightOverflow,
  NoConvergence,
  MassNotPD,
  TooLarge,
  ZeroVector,
  TooFewRecords,
  WrongWeightTag,
  SupportViolation,
  ParseError,
  ValidationError,
  MissingColumn,
  TooFewRows,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace maglab
