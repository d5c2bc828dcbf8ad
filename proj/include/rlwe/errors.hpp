#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rlwe {

enum class ErrorCode {
  kBadModulus,
  kNonUnitGenerator,
  kNonUnit,
  kNotPrime,
  kRamifiedPrime,
  kZeroElement,
  kPrecisionLoss,
  kNotInSubfield,
  kUnsupportedContext,
  kEmptyBins,
  kConvergenceFailure,
  kNotADistribution,
  kInsufficientSamples,
  kSingularSystem,
  kHashMismatch,
  kIo,
  kInvalidArgument,
};

std::string_view error_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rlwe
