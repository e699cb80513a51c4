#ifndef PEOC_ERRORS_HPP_
#define PEOC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace peoc {

// Coarse category used by the CLI to pick an exit code.
enum class ErrorKind { kData, kInternal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define PEOC_DEFINE_ERROR(Name, Kind)                             \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what)                        \
        : Error(ErrorKind::Kind, std::string(#Name ": ") + what) {} \
  };

PEOC_DEFINE_ERROR(ShapeMismatch, kInternal)
PEOC_DEFINE_ERROR(UnsatisfiableSeed, kInternal)
PEOC_DEFINE_ERROR(SteppedTerminalState, kInternal)
PEOC_DEFINE_ERROR(EmptyTrajectory, kInternal)
PEOC_DEFINE_ERROR(NonFiniteLoss, kInternal)
PEOC_DEFINE_ERROR(InvalidConfig, kData)
PEOC_DEFINE_ERROR(EmptyInput, kData)
PEOC_DEFINE_ERROR(SingleClassInput, kData)
PEOC_DEFINE_ERROR(EmptyTrainSet, kData)
PEOC_DEFINE_ERROR(TooFewPoints, kData)
PEOC_DEFINE_ERROR(NoAcceptedRepeats, kData)
PEOC_DEFINE_ERROR(UnknownKey, kData)
PEOC_DEFINE_ERROR(RangeError, kData)
PEOC_DEFINE_ERROR(IoError, kData)
PEOC_DEFINE_ERROR(FormatError, kData)

#undef PEOC_DEFINE_ERROR

// Malformed text input; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::kData,
              "ParseError: line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace peoc

#endif  // PEOC_ERRORS_HPP_
