#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crowd {

enum class ErrorCode {
  InvalidInput,
  InvalidMatrix,
  DegenerateMatrix,
  NoWorkers,
  StaleState,
  EmptyChain,
  CorruptChain,
  InvalidJob,
  JobNotFinished,
  ProtocolError,
  FrameError,
  UndefinedFairness,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::NoWorkers: return "NoWorkers";
    case ErrorCode::StaleState: return "StaleState";
    case ErrorCode::EmptyChain: return "EmptyChain";
    case ErrorCode::CorruptChain: return "CorruptChain";
    case ErrorCode::InvalidJob: return "InvalidJob";
    case ErrorCode::JobNotFinished: return "JobNotFinished";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::FrameError: return "FrameError";
    case ErrorCode::UndefinedFairness: return "UndefinedFairness";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so
// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace crowd
