#pragma once

// RLWE instances over K = Q(zeta_m)^H: secrets, discrete Gaussian errors,
// sample generation, the prime-cyclotomic dual observations and the
// modulus-switching map.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "rlwe/cyclo_group.hpp"
#include "rlwe/lattice.hpp"
#include "rlwe/real.hpp"
#include "rlwe/rng.hpp"

namespace rlwe {

/// Largest |x - round(x)| accepted when rounding a numeric ring product.
inline constexpr double kRoundingTolerance = 1e-3;

enum class SecretMode { kUniform, kGaussian };

struct InstanceParams {
  std::int64_t m = 0;
  std::vector<std::int64_t> gens;  // generators of H; {1} for Q(zeta_p)
  bool prime_cyclotomic = false;   // written as {"p": m} in instance files
  std::int64_t q = 0;
  double sigma0 = 1.0;  // relative width, or the absolute sigma in kAbsolute mode
  SigmaMode sigma_mode = SigmaMode::kGeometricMean;
  SecretMode secret_mode = SecretMode::kUniform;
  std::uint64_t seed = 0;
  int precision_bits = 0;  // 0 selects default_precision_bits(n)
  double r = 0;            // dual-attack width; nonzero marks a dual instance file

  static InstanceParams prime_cyclotomic_field(std::int64_t p, std::int64_t q, double sigma0, std::uint64_t seed);
};

/// Exact multiplication in O_K on normal-basis coordinates.  Products are taken
/// coordinatewise in the real embedding and mapped back through A_w^{-1}; the
/// result is rounded and accepted only if every coordinate was within
/// kRoundingTolerance of an integer.  A second attempt at the working MPFR
/// precision is made before giving up with PrecisionLoss.
class RingMultiplier {
 public:
  RingMultiplier(const SubgroupDescriptor& H, const Matrix<double>& aw, const Matrix<double>& aw_inv,
                 int precision_bits);

  int degree() const { return static_cast<int>(aw_.cols()); }
  Vector<double> embed(const IntVector& x) const;
  /// Exact product; throws PrecisionLoss.
  IntVector multiply(const IntVector& x, const IntVector& y) const;
  /// Product of two embedded elements, rounded.  Returns nullopt when the
  /// rounding residual is too large; `residual` receives it either way.
  std::optional<IntVector> multiply_embedded(const Vector<double>& ex, const Vector<double>& ey,
                                             double* residual = nullptr) const;
  /// x*y reduced mod q into [0, q), multiplying centred representatives.
  IntVector multiply_mod(const IntVector& x, const IntVector& y, std::int64_t q) const;

 private:
  Vector<double> pointwise(const Vector<double>& ex, const Vector<double>& ey) const;
  IntVector multiply_high_precision(const IntVector& x, const IntVector& y) const;

  SubgroupDescriptor field_;
  Matrix<double> aw_;
  Matrix<double> aw_inv_;
  bool totally_real_;
  int precision_bits_;
  // Lazily built MPFR copies for the fallback path.
  mutable std::once_flag hi_once_;
  mutable std::shared_ptr<const Matrix<Real>> aw_hi_;
  mutable std::shared_ptr<const Matrix<Real>> aw_inv_hi_;
};

/// Everything about K that does not depend on q, sigma or the secret.
struct FieldGeometry {
  SubgroupDescriptor field;
  int precision_bits = 53;
  double log_disc_abs = 0;   // log |d_K|
  double gs_log_mean = 0;    // mean of log |g_i| over the Gram-Schmidt vectors
  double realness_residual = 0;
  double unitarity_residual = 0;
  LatticeBundle<double> lattice;  // final_sigma holds exp(gs_log_mean)
  std::shared_ptr<const RingMultiplier> ring;

  int degree() const { return field.degree(); }
};

std::shared_ptr<const FieldGeometry> build_field_geometry(const SubgroupDescriptor& H, int precision_bits = 0);

class RlweInstance {
 public:
  static RlweInstance create(const InstanceParams& params);
  static RlweInstance create(const InstanceParams& params, std::shared_ptr<const FieldGeometry> geometry);

  /// Same field, new modulus.  The secret ring element is the centred lift of
  /// the old one, reduced into [0, q').
  RlweInstance with_modulus(std::int64_t q) const;
  RlweInstance with_secret(IntVector secret) const;

  const InstanceParams& params() const { return params_; }
  const SubgroupDescriptor& field() const { return geometry_->field; }
  const FieldGeometry& geometry() const { return *geometry_; }
  std::shared_ptr<const FieldGeometry> geometry_ptr() const { return geometry_; }
  const LatticeBundle<double>& lattice() const { return geometry_->lattice; }
  const RingMultiplier& ring() const { return *geometry_->ring; }
  int degree() const { return geometry_->degree(); }
  std::int64_t modulus() const { return params_.q; }
  double sigma0() const { return sigma0_; }
  double sigma() const { return sigma_; }
  const IntVector& secret() const { return secret_; }

 private:
  InstanceParams params_;
  std::shared_ptr<const FieldGeometry> geometry_;
  double sigma0_ = 0;
  double sigma_ = 0;
  IntVector secret_;
};

struct RlweSample {
  IntVector a;
  IntVector b;
};

/// One draw from D_{Lambda_R, sigma}, as coordinates on the normal basis.
IntVector sample_error(const RlweInstance& inst, Stream& rng);

/// Sample i uses stream (seed, kSample, first_index + i), so any slice of a
/// campaign can be regenerated independently and thread count is irrelevant.
struct GenerationOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  std::uint64_t first_index = 0;
};

std::vector<RlweSample> generate_samples(const RlweInstance& inst, std::size_t count, const GenerationOptions& opt,
                                         std::vector<IntVector>* errors = nullptr);
std::vector<RlweSample> generate_uniform_samples(int n, std::int64_t q, std::size_t count,
                                                 const GenerationOptions& opt);
/// Errors only, without the ring products.
std::vector<IntVector> generate_errors(const RlweInstance& inst, std::size_t count, const GenerationOptions& opt);

/// Observations rho(b') mod p for the dual attack on Q(zeta_p): each draws
/// e_0..e_{p-1} with standard deviation sqrt(p) r / sqrt(2 pi) and returns
/// eps_0 = e_0 + ... + e_{p-2} - (p-1) e_{p-1} reduced into [0, p).
std::vector<double> generate_dual_observations(std::int64_t p, double r, std::size_t count,
                                               const GenerationOptions& opt);
double dual_epsilon0(std::span<const double> e);
double reduce_circle(double x, double p);

/// Coordinates of 1 in the normal basis, via Babai rounding of iota(1).
IntVector ring_one(const FieldGeometry& geometry);

/// Reduction of Z[zeta_p] modulo (1 - zeta_p): the coordinate sum mod p.
std::int64_t ramified_reduce(const IntVector& coeffs, std::int64_t p);

struct SwitchedSample {
  RlweSample sample;      // a', b' reduced mod p
  Vector<double> a_err;   // a'' = (p/q) a - a'
  Vector<double> b_err;
  IntVector a_err_scaled;  // q a'' = p a - q a', exact
  IntVector b_err_scaled;
  IntVector a_lift;        // a' before reduction mod p
  IntVector b_lift;
};

/// pi_{q,p}: scale a and b by p/q in the embedding and round back to the
/// lattice with a shifted discrete Gaussian of width tau.
SwitchedSample modulus_switch(const LatticeBundle<double>& L, const RlweSample& sample, std::int64_t q,
                              std::int64_t p, double tau, Stream& rng);

std::vector<SwitchedSample> modulus_switch_all(const LatticeBundle<double>& L, const std::vector<RlweSample>& samples,
                                               std::int64_t q, std::int64_t p, double tau,
                                               const GenerationOptions& opt);

IntVector reduce_mod(const IntVector& x, std::int64_t q);
IntVector centered_mod(const IntVector& x, std::int64_t q);

}  // namespace rlwe
