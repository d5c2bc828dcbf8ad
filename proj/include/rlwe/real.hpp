#pragma once

// Scalar types shared by the linear-algebra modules.
//
// Everything geometric is templated on the scalar.  `double` is the fast path
// used by the samplers; `Real` is an MPFR-backed float whose mantissa width is
// chosen at run time (see PrecisionScope).

#include <cstdint>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace rlwe {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Sets the default mantissa width (in bits) of `Real` for the lifetime of the
/// object and restores the previous width afterwards.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned previous_digits10_;
};

/// Working precision for a field of degree n: 100 bits up to n = 60, 200 bits
/// up to n = 150 and hardware doubles beyond that.  RLWE_FORGE_PRECISION
/// overrides the table when set to an integer >= 53.
int default_precision_bits(int n);

template <typename Scalar>
Scalar pi_value() {
  if constexpr (std::is_same_v<Scalar, double>) {
    return std::numbers::pi;
  } else {
    return boost::math::constants::pi<Scalar>();
  }
}

template <typename Scalar>
double to_double(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

/// 2^{-bits/2}, the relative tolerance used for residual checks at a given
/// working precision.
inline double half_precision_tolerance(int bits) { return std::ldexp(1.0, -bits / 2); }

}  // namespace rlwe
