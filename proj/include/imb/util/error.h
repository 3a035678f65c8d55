#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace imb {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidCalibration,
  kDegenerateSample,
  kNoIntersection,
  kCheiralityUndecidable,
  kInsufficientCorrespondences,
  kEstimationFailed,
  kPureRotation,
  kNoPairs,
  kAlignmentUnderdetermined,
  kFormat,
  kIo,
  kValidation,
  kSampling,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// A malformed input file. `location` is "path:line N" for text formats and
// "path@offset N" for binary formats.
class FormatError : public Error {
 public:
  FormatError(std::string location, const std::string& message)
      : Error(ErrorCode::kFormat, location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

[[noreturn]] inline void Throw(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

#define IMB_CHECK_ARG(cond, msg)                                    \
  do {                                                              \
    if (!(cond)) ::imb::Throw(::imb::ErrorCode::kInvalidArgument,   \
                              std::string(msg) + " [" #cond "]");   \
  } while (false)

}  // namespace imb
