#pragma once

#include <stdexcept>
#include <string>

namespace tidy {

enum class ErrorCode {
  ParseError,
  InconsistentDimensions,
  UnknownRoomLabel,
  UnknownRoom,
  RoomHasNoFreeCell,
  OutOfBounds,
  DuplicateRating,
  RatingOutOfScale,
  VocabularyMismatch,
  EmptyCorpus,
  DivergenceDetected,
  UnknownUser,
  UnknownItem,
  UnknownObject,
  UnknownReceptacle,
  GoalUntraversable,
  NoPathExists,
  NoApproachExists,
  MalformedTree,
  MissingBinding,
  UnboundLeaf,
  BlackboardKeyMissing,
  BlackboardTypeMismatch,
  NoTempLocation,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. Every failure mode carries a machine-checkable
/// code plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a source position, thrown by the map/corpus/scenario
/// readers.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace tidy
