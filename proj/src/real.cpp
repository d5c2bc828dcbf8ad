#include "rlwe/real.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "rlwe/errors.hpp"

namespace rlwe {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadModulus: return "BadModulus";
    case ErrorCode::kNonUnitGenerator: return "NonUnitGenerator";
    case ErrorCode::kNonUnit: return "NonUnit";
    case ErrorCode::kNotPrime: return "NotPrime";
    case ErrorCode::kRamifiedPrime: return "RamifiedPrime";
    case ErrorCode::kZeroElement: return "ZeroElement";
    case ErrorCode::kPrecisionLoss: return "PrecisionLoss";
    case ErrorCode::kNotInSubfield: return "NotInSubfield";
    case ErrorCode::kUnsupportedContext: return "UnsupportedContext";
    case ErrorCode::kEmptyBins: return "EmptyBins";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kNotADistribution: return "NotADistribution";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kHashMismatch: return "HashMismatch";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

unsigned bits_to_digits10(int bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace

PrecisionScope::PrecisionScope(int bits) : previous_digits10_(Real::default_precision()) {
  if (bits < 53) {
    throw Error(ErrorCode::kInvalidArgument, "precision must be at least 53 bits");
  }
  Real::default_precision(bits_to_digits10(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(previous_digits10_); }

int default_precision_bits(int n) {
  if (const char* env = std::getenv("RLWE_FORGE_PRECISION"); env != nullptr && *env != '\0') {
    try {
      int bits = std::stoi(env);
      if (bits < 53) {
        throw Error(ErrorCode::kInvalidArgument, "RLWE_FORGE_PRECISION must be >= 53");
      }
      return bits;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("RLWE_FORGE_PRECISION is not an integer: ") + env);
    }
  }
  if (n <= 60) return 100;
  if (n <= 150) return 200;
  return 53;
}

}  // namespace rlwe
