#pragma once

// Floating-point LLL, Gram-Schmidt, Babai's nearest plane and the randomized
// nearest-plane (GPV) discrete Gaussian sampler.  Bases are column vectors.
//
// The GPV sampler is only an approximation of D_{L,sigma} when sigma is below
// the smoothing regime of the reduced basis; it is reproduced here as the
// reference sampler, not as an exact one.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "rlwe/errors.hpp"
#include "rlwe/real.hpp"
#include "rlwe/rng.hpp"

namespace rlwe {

enum class SigmaMode {
  kAbsolute,       // sigma is used as given
  kGeometricMean,  // sigma is multiplied by (prod gs_norms)^{1/n}
};

template <typename Scalar>
struct LllResult {
  IntMatrix U;
  Matrix<Scalar> B;
  int swaps = 0;
};

namespace detail {

template <typename Scalar>
std::int64_t round_to_int(const Scalar& x) {
  double d = to_double(x);
  if (!(std::abs(d) < 4.0e18)) {
    throw Error(ErrorCode::kPrecisionLoss, "coefficient does not fit a 64-bit integer");
  }
  return std::llround(d);
}

}  // namespace detail

/// delta-LLL on the columns of A.  Gram-Schmidt rows are recomputed from the
/// current basis whenever the index k advances (Schnorr-Euchner style), so no
/// incremental update formulas accumulate error.
template <typename Scalar>
LllResult<Scalar> lll_reduce(const Matrix<Scalar>& A, double delta = 0.99) {
  if (!(delta > 0.25 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "LLL delta must lie in (1/4, 1)");
  }
  const Eigen::Index n = A.cols();
  LllResult<Scalar> out;
  out.B = A;
  out.U = IntMatrix::Identity(n, n);
  if (n == 0) return out;

  Matrix<Scalar>& B = out.B;
  IntMatrix& U = out.U;
  Matrix<Scalar> bstar(A.rows(), n);
  Vector<Scalar> bnorm(n);
  Matrix<Scalar> mu = Matrix<Scalar>::Zero(n, n);

  auto compute_row = [&](Eigen::Index k) {
    Vector<Scalar> v = B.col(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      mu(k, j) = v.dot(bstar.col(j)) / bnorm(j);
      v -= mu(k, j) * bstar.col(j);
    }
    bstar.col(k) = v;
    bnorm(k) = v.squaredNorm();
    if (!(bnorm(k) > 0)) throw Error(ErrorCode::kPrecisionLoss, "LLL: basis is singular");
  };

  const long long cap = 10LL * n * n;
  const Scalar d = Scalar(delta);
  Eigen::Index k = 0;
  while (k < n) {
    compute_row(k);
    for (int pass = 0; pass < 64; ++pass) {
      bool large = false;
      for (Eigen::Index j = k - 1; j >= 0; --j) {
        std::int64_t r = detail::round_to_int(mu(k, j));
        if (r == 0) continue;
        if (std::abs(r) > 1) large = true;
        B.col(k) -= Scalar(r) * B.col(j);
        U.col(k) -= r * U.col(j);
        for (Eigen::Index i = 0; i < j; ++i) mu(k, i) -= Scalar(r) * mu(j, i);
        mu(k, j) -= Scalar(r);
      }
      if (!large) break;
      compute_row(k);
      if (pass == 63) throw Error(ErrorCode::kPrecisionLoss, "LLL: size reduction did not converge");
    }
    if (k > 0 && bnorm(k) < (d - mu(k, k - 1) * mu(k, k - 1)) * bnorm(k - 1)) {
      B.col(k).swap(B.col(k - 1));
      U.col(k).swap(U.col(k - 1));
      if (++out.swaps > cap) {
        throw Error(ErrorCode::kPrecisionLoss, "LLL: swap cap of 10 n^2 exceeded");
      }
      k = k - 1;
    } else {
      ++k;
    }
  }
  return out;
}

template <typename Scalar>
struct GramSchmidtData {
  Matrix<Scalar> G;
  Vector<Scalar> norms;
};

/// Column Gram-Schmidt, G_i = B_i - sum_{j<i} mu_ij G_j (modified ordering).
template <typename Scalar>
GramSchmidtData<Scalar> gram_schmidt(const Matrix<Scalar>& B, int precision_bits = 53) {
  using std::sqrt;
  const Eigen::Index n = B.cols();
  GramSchmidtData<Scalar> out;
  out.G = B;
  out.norms.resize(n);
  const Scalar tol = Scalar(half_precision_tolerance(precision_bits));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      Scalar mu = out.G.col(i).dot(out.G.col(j)) / (out.norms(j) * out.norms(j));
      out.G.col(i) -= mu * out.G.col(j);
    }
    out.norms(i) = sqrt(out.G.col(i).squaredNorm());
    if (!(out.norms(i) > tol * sqrt(B.col(i).squaredNorm()))) {
      throw Error(ErrorCode::kPrecisionLoss, "Gram-Schmidt norm underflow at column " + std::to_string(i));
    }
  }
  return out;
}

/// max_{i != j} |G_i . G_j| / (|G_i| |G_j|).
template <typename Scalar>
double orthogonality_residual(const GramSchmidtData<Scalar>& gs) {
  using std::abs;
  double worst = 0;
  for (Eigen::Index i = 0; i < gs.G.cols(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      Scalar r = abs(gs.G.col(i).dot(gs.G.col(j))) / (gs.norms(i) * gs.norms(j));
      worst = std::max(worst, to_double(r));
    }
  }
  return worst;
}

template <typename Scalar>
struct LatticeBundle {
  Matrix<Scalar> A;  // original basis
  IntMatrix U;       // B = A U
  Matrix<Scalar> B;  // LLL-reduced basis
  Matrix<Scalar> G;  // Gram-Schmidt vectors of B
  Vector<Scalar> gs_norms;
  double final_sigma = 1.0;
  int precision_bits = 53;

  Eigen::Index dimension() const { return A.cols(); }
};

/// Reduces A (LLL in doubles, then a polishing pass at the working scalar),
/// orthogonalizes the result and fixes the per-call sigma.
template <typename Scalar>
LatticeBundle<Scalar> make_lattice_bundle(const Matrix<Scalar>& A, int precision_bits, double sigma,
                                          SigmaMode mode, double delta = 0.99) {
  using std::log;
  LatticeBundle<Scalar> L;
  L.A = A;
  L.precision_bits = precision_bits;
  Matrix<double> A_fast = A.unaryExpr([](const Scalar& x) { return to_double(x); });
  LllResult<double> coarse = lll_reduce<double>(A_fast, delta);
  Matrix<Scalar> B1 = A * coarse.U.template cast<Scalar>();
  if constexpr (std::is_same_v<Scalar, double>) {
    L.U = coarse.U;
    L.B = B1;
  } else {
    LllResult<Scalar> fine = lll_reduce<Scalar>(B1, delta);
    L.U = coarse.U * fine.U;
    L.B = A * L.U.template cast<Scalar>();
  }
  GramSchmidtData<Scalar> gs = gram_schmidt<Scalar>(L.B, precision_bits);
  L.G = std::move(gs.G);
  L.gs_norms = std::move(gs.norms);
  if (mode == SigmaMode::kGeometricMean) {
    Scalar mean_log = 0;
    for (Eigen::Index i = 0; i < L.gs_norms.size(); ++i) mean_log += log(L.gs_norms(i));
    mean_log /= Scalar(static_cast<double>(L.gs_norms.size()));
    L.final_sigma = sigma * std::exp(to_double(mean_log));
  } else {
    L.final_sigma = sigma;
  }
  return L;
}

template <typename Scalar>
LatticeBundle<double> to_double_bundle(const LatticeBundle<Scalar>& L) {
  auto cvt = [](const Scalar& x) { return to_double(x); };
  LatticeBundle<double> D;
  D.A = L.A.unaryExpr(cvt);
  D.U = L.U;
  D.B = L.B.unaryExpr(cvt);
  D.G = L.G.unaryExpr(cvt);
  D.gs_norms = L.gs_norms.unaryExpr(cvt);
  D.final_sigma = L.final_sigma;
  D.precision_bits = L.precision_bits;
  return D;
}

template <typename Scalar>
struct BabaiResult {
  Vector<Scalar> v;  // lattice vector, v = A z
  IntVector z;       // coordinates w.r.t. A
};

template <typename Scalar>
BabaiResult<Scalar> babai_nearest_plane(const LatticeBundle<Scalar>& L, const Vector<Scalar>& target) {
  const Eigen::Index n = L.dimension();
  if (target.size() != n) throw Error(ErrorCode::kInvalidArgument, "target dimension mismatch");
  Vector<Scalar> residual = target;
  IntVector zs(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    Scalar coef = residual.dot(L.G.col(i)) / (L.gs_norms(i) * L.gs_norms(i));
    std::int64_t z = detail::round_to_int(coef);
    residual -= Scalar(z) * L.B.col(i);
    zs(i) = z;
  }
  return {target - residual, L.U * zs};
}

/// Integer z with Pr(z) proportional to exp(-(z-c)^2 / (2 sigma^2)), by
/// inversion over the truncated support |z - c| <= 10 sigma.  When that support
/// holds no integer the nearest integer to c is returned.
inline std::int64_t sample_integer_gaussian(double sigma, double center, Stream& rng) {
  constexpr double kTail = 10.0;
  if (!(sigma > 0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  const double lo = std::ceil(center - kTail * sigma);
  const double hi = std::floor(center + kTail * sigma);
  if (lo > hi) return std::llround(center);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double total = 0;
  for (double z = lo; z <= hi; z += 1.0) total += std::exp(-(z - center) * (z - center) * inv);
  std::uniform_real_distribution<double> uniform(0.0, total);
  double u = uniform(rng);
  double z = lo;
  for (; z < hi; z += 1.0) {
    u -= std::exp(-(z - center) * (z - center) * inv);
    if (u < 0) break;
  }
  return static_cast<std::int64_t>(z);
}

/// Randomized nearest plane: for i = n..1 draw an integer Gaussian of width
/// sigma / |G_i| centred at the projection of the running centre.  Returns
/// coordinates with respect to the original basis A.  A null centre means the
/// origin.
template <typename Scalar>
IntVector sample_lattice_gaussian(const LatticeBundle<Scalar>& L, double sigma,
                                  const Vector<Scalar>* center, Stream& rng) {
  const Eigen::Index n = L.dimension();
  Vector<Scalar> c = center != nullptr ? *center : Vector<Scalar>::Zero(n);
  IntVector zs(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const Scalar norm = L.gs_norms(i);
    double ci = to_double(Scalar(c.dot(L.G.col(i)) / (norm * norm)));
    double si = sigma / to_double(norm);
    std::int64_t z = sample_integer_gaussian(si, ci, rng);
    if (z != 0) c -= Scalar(z) * L.B.col(i);
    zs(i) = z;
  }
  return L.U * zs;
}

}  // namespace rlwe
