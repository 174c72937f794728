#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace llweave {

enum class ErrorCode {
  Syntax,
  ChannelClash,
  MissingChannel,
  NotFresh,
  ContextMismatch,
  CutMismatch,
  NotComposable,
  Timeout,
  StaleRedex,
  UnknownRef,
  ArityMismatch,
  InvalidRedexId,
  StepLimit,
  DuplicateName,
  EmptyService,
  PortInUse,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Syntax error carrying the byte offset (or line number for line-oriented formats).
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message, const char* unit = "position")
      : Error(ErrorCode::Syntax, message + " at " + unit + " " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace llweave
