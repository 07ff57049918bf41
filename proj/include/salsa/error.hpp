#pragma once

#include <stdexcept>
#include <string>

namespace salsa {

// Base of every error thrown by the library. Contract violations that the
// caller can check up front (bad slot index, misaligned ref) are asserted,
// not thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SALSA_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

// Counter layer.
SALSA_DEFINE_ERROR(ValueTooWide)
SALSA_DEFINE_ERROR(MaxLevelReached)
SALSA_DEFINE_ERROR(SplitUnrepresentable)
SALSA_DEFINE_ERROR(SplitNotMaxMerge)
SALSA_DEFINE_ERROR(SnapshotError)

// Sketches and algebra.
SALSA_DEFINE_ERROR(InvalidConfig)
SALSA_DEFINE_ERROR(NegativeWeight)
SALSA_DEFINE_ERROR(LevelTooSmall)
SALSA_DEFINE_ERROR(ConfigMismatch)
SALSA_DEFINE_ERROR(NegativeResult)

// Estimators and metrics.
SALSA_DEFINE_ERROR(EmptyStream)
SALSA_DEFINE_ERROR(EmptySeries)
SALSA_DEFINE_ERROR(EmptyOracle)
SALSA_DEFINE_ERROR(AllSlotsOccupied)

// Trace I/O.
SALSA_DEFINE_ERROR(IoError)

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#undef SALSA_DEFINE_ERROR

}  // namespace salsa
