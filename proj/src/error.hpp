#pragma once

#include <stdexcept>
#include <string>

namespace fpm {

// Mirrors fpm_status in the public C header; values must stay in sync.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kIo = 2,
  kOutOfBounds = 3,
  kEmptyRoi = 4,
  kTruncatedRidge = 5,
  kTooFewMinutiae = 6,
  kNotEnrollable = 7,
  kEmptyTemplate = 8,
  kCorruptTemplate = 9,
  kSpecTooLarge = 10,
  kSpecInfeasible = 11,
  kEmptyScoreList = 12,
  kConfig = 13,
  kInternal = 14,
};

const char* errorCodeName(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NotEnrollableError : public Error {
 public:
  explicit NotEnrollableError(int goodCount)
      : Error(ErrorCode::kNotEnrollable,
              "template has " + std::to_string(goodCount) +
                  " good-quality minutiae, at least 10 required"),
        count_(goodCount) {}

  int goodCount() const noexcept { return count_; }

 private:
  int count_;
};

}  // namespace fpm
