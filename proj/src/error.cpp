#include "tidy/error.hpp"

namespace tidy {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::UnknownRoomLabel: return "UnknownRoomLabel";
    case ErrorCode::UnknownRoom: return "UnknownRoom";
    case ErrorCode::RoomHasNoFreeCell: return "RoomHasNoFreeCell";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DuplicateRating: return "DuplicateRating";
    case ErrorCode::RatingOutOfScale: return "RatingOutOfScale";
    case ErrorCode::VocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnknownReceptacle: return "UnknownReceptacle";
    case ErrorCode::GoalUntraversable: return "GoalUntraversable";
    case ErrorCode::NoPathExists: return "NoPathExists";
    case ErrorCode::NoApproachExists: return "NoApproachExists";
    case ErrorCode::MalformedTree: return "MalformedTree";
    case ErrorCode::MissingBinding: return "MissingBinding";
    case ErrorCode::UnboundLeaf: return "UnboundLeaf";
    case ErrorCode::BlackboardKeyMissing: return "BlackboardKeyMissing";
    case ErrorCode::BlackboardTypeMismatch: return "BlackboardTypeMismatch";
    case ErrorCode::NoTempLocation: return "NoTempLocation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(int line, int column, const std::string& message)
    : Error(ErrorCode::ParseError,
            "line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace tidy
