#include "maglab/error.hpp"

namespace maglab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NegativeScale: return "NegativeScale";
    case ErrorKind::NonAdjacent: return "NonAdjacent";
    case ErrorKind::WeightOverflow: return "WeightOverflow";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::MassNotPD: return "MassNotPD";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::TooFewRecords: return "TooFewRecords";
    case ErrorKind::WrongWeightTag: return "WrongWeightTag";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::TooFewRows: return "TooFewRows";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace maglab
