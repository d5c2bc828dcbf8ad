#pragma once

// Adjusted canonical embedding of the normal integral basis
// w_c = sum_{h in H} zeta_m^{h c} of K = Q(zeta_m)^H.

#include <cmath>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rlwe/cyclo_group.hpp"
#include "rlwe/errors.hpp"
#include "rlwe/real.hpp"

namespace rlwe {

template <typename Scalar>
struct EmbeddingData {
  // A_can(k, j) = sigma_k(w_j) = sum_h zeta^{h k j}, split into real and imaginary parts.
  Matrix<Scalar> can_re;
  Matrix<Scalar> can_im;
  Matrix<Scalar> t_re;
  Matrix<Scalar> t_im;
  // A_w = T A_can; columns are iota(w_j).
  Matrix<Scalar> aw;
  int precision_bits = 53;
  int r1 = 0;
  int r2 = 0;
  double realness_residual = 0;
  double unitarity_residual = 0;
};

namespace detail {

// zeta_m^k for k = 0..m-1.
template <typename Scalar>
void root_table(std::int64_t m, std::vector<Scalar>& re, std::vector<Scalar>& im) {
  using std::cos;
  using std::sin;
  re.resize(static_cast<std::size_t>(m));
  im.resize(static_cast<std::size_t>(m));
  const Scalar two_pi = 2 * pi_value<Scalar>();
  for (std::int64_t k = 0; k < m; ++k) {
    Scalar angle = two_pi * Scalar(k) / Scalar(m);
    re[k] = cos(angle);
    im[k] = sin(angle);
  }
}

}  // namespace detail

/// Builds A_can, T and A_w = T A_can.  Throws PrecisionLoss when T is not
/// unitary or A_w is not real to within 2^{-precision_bits/2}.
template <typename Scalar>
EmbeddingData<Scalar> embedding_matrix(const SubgroupDescriptor& H, int precision_bits) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  using std::abs;
  if (precision_bits < 53) {
    throw Error(ErrorCode::kInvalidArgument, "precision_bits must be >= 53");
  }
  const std::int64_t m = H.modulus();
  const int n = H.degree();
  const auto& cosets = H.cosets();
  const auto& elements = H.elements();

  std::vector<Scalar> zre, zim;
  detail::root_table(m, zre, zim);

  EmbeddingData<Scalar> E;
  E.precision_bits = precision_bits;
  E.can_re.setZero(n, n);
  E.can_im.setZero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      std::int64_t kj = cosets[k] * cosets[j] % m;
      Scalar re = 0, im = 0;
      for (std::int64_t h : elements) {
        std::int64_t e = h * kj % m;
        re += zre[e];
        im += zim[e];
      }
      E.can_re(k, j) = re;
      E.can_im(k, j) = im;
    }
  }

  E.t_re.setZero(n, n);
  E.t_im.setZero(n, n);
  if (H.totally_real()) {
    E.r1 = n;
    E.r2 = 0;
    E.t_re.setIdentity();
  } else {
    E.r1 = 0;
    E.r2 = n / 2;
    const int h = n / 2;
    const Scalar s = 1 / sqrt(Scalar(2));
    for (int i = 0; i < h; ++i) {
      E.t_re(i, i) = s;
      E.t_re(i, i + h) = s;
      E.t_im(i + h, i) = -s;
      E.t_im(i + h, i + h) = s;
    }
  }

  E.aw = E.t_re * E.can_re - E.t_im * E.can_im;
  Matrix<Scalar> imag = E.t_re * E.can_im + E.t_im * E.can_re;

  Matrix<Scalar> tt_re = E.t_re.transpose() * E.t_re + E.t_im.transpose() * E.t_im;
  Matrix<Scalar> tt_im = E.t_re.transpose() * E.t_im - E.t_im.transpose() * E.t_re;
  tt_re -= Matrix<Scalar>::Identity(n, n);

  Scalar scale = E.aw.cwiseAbs().maxCoeff();
  E.realness_residual = to_double(Scalar(imag.cwiseAbs().maxCoeff() / scale));
  E.unitarity_residual =
      to_double(Scalar((std::max)(tt_re.cwiseAbs().maxCoeff(), tt_im.cwiseAbs().maxCoeff())));
  const double tol = half_precision_tolerance(precision_bits);
  if (E.realness_residual > tol || E.unitarity_residual > tol) {
    throw Error(ErrorCode::kPrecisionLoss, "embedding residual exceeds 2^(-precision/2)");
  }
  return E;
}

/// log |det A_w| via partial-pivot LU; stays finite when det itself would
/// overflow a double.
template <typename Scalar>
Scalar log_abs_det(const Matrix<Scalar>& A) {
  using std::log;
  using std::abs;
  Eigen::PartialPivLU<Matrix<Scalar>> lu(A);
  const Matrix<Scalar>& packed = lu.matrixLU();
  Scalar acc = 0;
  for (Eigen::Index i = 0; i < packed.rows(); ++i) acc += log(abs(packed(i, i)));
  return acc;
}

template <typename Scalar>
struct Discriminant {
  Scalar value;      // |det A_w|^2
  Scalar log_value;  // log |d_K|
  std::optional<boost::multiprecision::cpp_int> nearest_integer;
};

/// |d_K| = det(A_w)^2.  nearest_integer is filled when the integer part is
/// resolvable at the working precision and the value is within 10^-3
/// (relative) of it.  A resolvable value farther than that from every
/// integer is a PrecisionLoss.
template <typename Scalar>
Discriminant<Scalar> discriminant_abs(const EmbeddingData<Scalar>& E) {
  using std::exp;
  using std::round;
  using std::abs;
  Discriminant<Scalar> D;
  D.log_value = 2 * log_abs_det(E.aw);
  D.value = exp(D.log_value);
  // Integers are resolvable while they fit well inside the mantissa.
  const double log2_value = to_double(D.log_value) / std::log(2.0);
  if (log2_value < E.precision_bits - 16) {
    Scalar r = round(D.value);
    Scalar gap = abs(D.value - r);
    if (gap > Scalar(1e-3) * (r > 1 ? r : Scalar(1))) {
      throw Error(ErrorCode::kPrecisionLoss, "discriminant is not close to an integer");
    }
    if constexpr (std::is_same_v<Scalar, double>) {
      D.nearest_integer = boost::multiprecision::cpp_int(static_cast<long long>(r));
    } else {
      D.nearest_integer = r.template convert_to<boost::multiprecision::cpp_int>();
    }
  }
  return D;
}

/// sigma = sigma0 * |d_K|^{1/(2n)}.
template <typename Scalar>
Scalar sigma_from_sigma0(const Scalar& sigma0, const Scalar& disc_abs, int n) {
  using std::pow;
  return sigma0 * pow(disc_abs, Scalar(1) / Scalar(2 * n));
}

/// Same as sigma_from_sigma0 but fed log |d_K|, for fields whose discriminant
/// overflows the scalar.
template <typename Scalar>
Scalar sigma_from_log_disc(const Scalar& sigma0, const Scalar& log_disc_abs, int n) {
  using std::exp;
  return sigma0 * exp(log_disc_abs / Scalar(2 * n));
}

/// Gram matrix of the embedded basis, A_w^T A_w.
template <typename Scalar>
Matrix<Scalar> gram_matrix(const EmbeddingData<Scalar>& E) {
  return E.aw.transpose() * E.aw;
}

}  // namespace rlwe
