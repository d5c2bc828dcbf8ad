#include "rlwe/rlwe.hpp"

#include <cmath>
#include <random>

#include "rlwe/embedding.hpp"
#include "rlwe/errors.hpp"
#include "rlwe/parallel.hpp"

namespace rlwe {

namespace {

std::mutex& high_precision_mutex() {
  static std::mutex mu;
  return mu;
}

template <typename Scalar>
std::optional<IntVector> round_vector(const Vector<Scalar>& v, double* residual) {
  using std::abs;
  using std::round;
  IntVector out(v.size());
  double worst = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Scalar r = round(v(i));
    worst = std::max(worst, to_double(Scalar(abs(v(i) - r))));
    out(i) = static_cast<std::int64_t>(to_double(r));
  }
  if (residual != nullptr) *residual = worst;
  if (!(worst < kRoundingTolerance)) return std::nullopt;
  return out;
}

template <typename Scalar>
Vector<Scalar> pointwise_product(const Vector<Scalar>& u, const Vector<Scalar>& v, bool totally_real) {
  using std::sqrt;
  const Eigen::Index n = u.size();
  if (totally_real) return u.cwiseProduct(v);
  Vector<Scalar> w(n);
  const Eigen::Index h = n / 2;
  const Scalar inv_sqrt2 = 1 / sqrt(Scalar(2));
  // Rows i and i+h hold sqrt(2) Re and sqrt(2) Im of the same complex place.
  for (Eigen::Index i = 0; i < h; ++i) {
    w(i) = (u(i) * v(i) - u(i + h) * v(i + h)) * inv_sqrt2;
    w(i + h) = (u(i) * v(i + h) + u(i + h) * v(i)) * inv_sqrt2;
  }
  return w;
}

}  // namespace

InstanceParams InstanceParams::prime_cyclotomic_field(std::int64_t p, std::int64_t q, double sigma0,
                                                      std::uint64_t seed) {
  InstanceParams params;
  params.m = p;
  params.gens = {1};
  params.prime_cyclotomic = true;
  params.q = q;
  params.sigma0 = sigma0;
  params.seed = seed;
  return params;
}

RingMultiplier::RingMultiplier(const SubgroupDescriptor& H, const Matrix<double>& aw, const Matrix<double>& aw_inv,
                               int precision_bits)
    : field_(H), aw_(aw), aw_inv_(aw_inv), totally_real_(H.totally_real()), precision_bits_(precision_bits) {}

Vector<double> RingMultiplier::embed(const IntVector& x) const { return aw_ * x.cast<double>(); }

Vector<double> RingMultiplier::pointwise(const Vector<double>& ex, const Vector<double>& ey) const {
  return pointwise_product<double>(ex, ey, totally_real_);
}

std::optional<IntVector> RingMultiplier::multiply_embedded(const Vector<double>& ex, const Vector<double>& ey,
                                                           double* residual) const {
  Vector<double> coords = aw_inv_ * pointwise(ex, ey);
  return round_vector<double>(coords, residual);
}

IntVector RingMultiplier::multiply(const IntVector& x, const IntVector& y) const {
  if (x.size() != degree() || y.size() != degree())
    throw Error(ErrorCode::kInvalidArgument, "ring element has wrong length");
  auto fast = multiply_embedded(embed(x), embed(y));
  if (fast) return *fast;
  return multiply_high_precision(x, y);
}

IntVector RingMultiplier::multiply_mod(const IntVector& x, const IntVector& y, std::int64_t q) const {
  return reduce_mod(multiply(centered_mod(x, q), centered_mod(y, q)), q);
}

IntVector RingMultiplier::multiply_high_precision(const IntVector& x, const IntVector& y) const {
  std::lock_guard<std::mutex> lock(high_precision_mutex());
  const int bits = std::max(precision_bits_, 128);
  PrecisionScope scope(bits);
  std::call_once(hi_once_, [&] {
    EmbeddingData<Real> E = embedding_matrix<Real>(field_, bits);
    aw_hi_ = std::make_shared<Matrix<Real>>(E.aw);
    aw_inv_hi_ = std::make_shared<Matrix<Real>>(Eigen::PartialPivLU<Matrix<Real>>(E.aw).inverse());
  });
  Vector<Real> ex = *aw_hi_ * x.cast<Real>();
  Vector<Real> ey = *aw_hi_ * y.cast<Real>();
  Vector<Real> coords = *aw_inv_hi_ * pointwise_product<Real>(ex, ey, totally_real_);
  double residual = 0;
  auto exact = round_vector<Real>(coords, &residual);
  if (!exact) {
    throw Error(ErrorCode::kPrecisionLoss,
                "ring product rounding residual " + std::to_string(residual) + " at " + std::to_string(bits) + " bits");
  }
  return *exact;
}

std::shared_ptr<const FieldGeometry> build_field_geometry(const SubgroupDescriptor& H, int precision_bits) {
  auto geo = std::make_shared<FieldGeometry>();
  geo->field = H;
  const int bits = precision_bits > 0 ? precision_bits : default_precision_bits(H.degree());
  geo->precision_bits = bits;
  Matrix<double> aw_inv;
  if (bits <= 53) {
    EmbeddingData<double> E = embedding_matrix<double>(H, 53);
    geo->realness_residual = E.realness_residual;
    geo->unitarity_residual = E.unitarity_residual;
    geo->log_disc_abs = 2 * log_abs_det(E.aw);
    geo->lattice = make_lattice_bundle<double>(E.aw, 53, 1.0, SigmaMode::kGeometricMean);
    aw_inv = Eigen::PartialPivLU<Matrix<double>>(E.aw).inverse();
  } else {
    PrecisionScope scope(bits);
    EmbeddingData<Real> E = embedding_matrix<Real>(H, bits);
    geo->realness_residual = E.realness_residual;
    geo->unitarity_residual = E.unitarity_residual;
    geo->log_disc_abs = to_double(Real(2 * log_abs_det(E.aw)));
    geo->lattice = to_double_bundle(make_lattice_bundle<Real>(E.aw, bits, 1.0, SigmaMode::kGeometricMean));
    Matrix<Real> inv = Eigen::PartialPivLU<Matrix<Real>>(E.aw).inverse();
    aw_inv = inv.unaryExpr([](const Real& v) { return to_double(v); });
  }
  geo->gs_log_mean = std::log(geo->lattice.final_sigma);
  geo->ring = std::make_shared<RingMultiplier>(H, geo->lattice.A, aw_inv, bits);
  return geo;
}

RlweInstance RlweInstance::create(const InstanceParams& params) {
  if (params.prime_cyclotomic && !is_prime(params.m))
    throw Error(ErrorCode::kNotPrime, std::to_string(params.m) + " is not prime");
  SubgroupDescriptor H = SubgroupDescriptor::create(params.m, params.gens);
  return create(params, build_field_geometry(H, params.precision_bits));
}

RlweInstance RlweInstance::create(const InstanceParams& params, std::shared_ptr<const FieldGeometry> geometry) {
  if (params.q < 2) throw Error(ErrorCode::kInvalidArgument, "modulus must be at least 2");
  if (!(params.sigma0 >= 0)) throw Error(ErrorCode::kInvalidArgument, "sigma0 must be non-negative");
  RlweInstance inst;
  inst.params_ = params;
  inst.geometry_ = std::move(geometry);
  const int n = inst.degree();
  const double root_disc = std::exp(inst.geometry_->log_disc_abs / (2.0 * n));
  if (params.sigma_mode == SigmaMode::kGeometricMean) {
    inst.sigma0_ = params.sigma0;
    inst.sigma_ = params.sigma0 * root_disc;
  } else {
    inst.sigma_ = params.sigma0;
    inst.sigma0_ = params.sigma0 / root_disc;
  }
  Stream rng(params.seed, stream_id(StreamTag::kSecret, 0));
  if (params.secret_mode == SecretMode::kUniform) {
    std::uniform_int_distribution<std::int64_t> uniform(0, params.q - 1);
    inst.secret_.resize(n);
    for (int i = 0; i < n; ++i) inst.secret_(i) = uniform(rng);
  } else {
    inst.secret_ = reduce_mod(sample_error(inst, rng), params.q);
  }
  return inst;
}

RlweInstance RlweInstance::with_modulus(std::int64_t q) const {
  if (q < 2) throw Error(ErrorCode::kInvalidArgument, "modulus must be at least 2");
  RlweInstance copy = *this;
  copy.params_.q = q;
  copy.secret_ = reduce_mod(centered_mod(secret_, params_.q), q);
  return copy;
}

RlweInstance RlweInstance::with_secret(IntVector secret) const {
  if (secret.size() != degree()) throw Error(ErrorCode::kInvalidArgument, "secret has wrong length");
  RlweInstance copy = *this;
  copy.secret_ = reduce_mod(secret, params_.q);
  return copy;
}

IntVector sample_error(const RlweInstance& inst, Stream& rng) {
  if (!(inst.sigma() > 0)) return IntVector::Zero(inst.degree());
  return sample_lattice_gaussian<double>(inst.lattice(), inst.sigma(), nullptr, rng);
}

std::vector<RlweSample> generate_samples(const RlweInstance& inst, std::size_t count, const GenerationOptions& opt,
                                         std::vector<IntVector>* errors) {
  const int n = inst.degree();
  const std::int64_t q = inst.modulus();
  const RingMultiplier& ring = inst.ring();
  const IntVector s_centered = centered_mod(inst.secret(), q);
  const Vector<double> es = ring.embed(s_centered);
  std::vector<RlweSample> out(count);
  std::vector<IntVector> errs(count);
  std::vector<char> retry(count, 0);
  parallel_for(count, opt.threads, [&](std::size_t begin, std::size_t end) {
    std::uniform_int_distribution<std::int64_t> uniform(0, q - 1);
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opt.seed, stream_id(StreamTag::kSample, opt.first_index + i));
      IntVector a(n);
      for (int j = 0; j < n; ++j) a(j) = uniform(rng);
      errs[i] = sample_error(inst, rng);
      auto prod = ring.multiply_embedded(ring.embed(centered_mod(a, q)), es);
      out[i].a = std::move(a);
      if (prod) {
        out[i].b = reduce_mod(*prod + errs[i], q);
      } else {
        retry[i] = 1;
      }
    }
  });
  for (std::size_t i = 0; i < count; ++i) {
    if (!retry[i]) continue;
    IntVector prod = ring.multiply(centered_mod(out[i].a, q), s_centered);
    out[i].b = reduce_mod(prod + errs[i], q);
  }
  if (errors != nullptr) *errors = std::move(errs);
  return out;
}

std::vector<RlweSample> generate_uniform_samples(int n, std::int64_t q, std::size_t count,
                                                 const GenerationOptions& opt) {
  std::vector<RlweSample> out(count);
  parallel_for(count, opt.threads, [&](std::size_t begin, std::size_t end) {
    std::uniform_int_distribution<std::int64_t> uniform(0, q - 1);
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opt.seed, stream_id(StreamTag::kUniform, opt.first_index + i));
      out[i].a.resize(n);
      out[i].b.resize(n);
      for (int j = 0; j < n; ++j) out[i].a(j) = uniform(rng);
      for (int j = 0; j < n; ++j) out[i].b(j) = uniform(rng);
    }
  });
  return out;
}

std::vector<IntVector> generate_errors(const RlweInstance& inst, std::size_t count, const GenerationOptions& opt) {
  std::vector<IntVector> out(count);
  parallel_for(count, opt.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opt.seed, stream_id(StreamTag::kAuxiliary, opt.first_index + i));
      out[i] = sample_error(inst, rng);
    }
  });
  return out;
}

double dual_epsilon0(std::span<const double> e) {
  const std::size_t p = e.size();
  double acc = 0;
  for (std::size_t i = 0; i + 1 < p; ++i) acc += e[i];
  return acc - static_cast<double>(p - 1) * e[p - 1];
}

double reduce_circle(double x, double p) {
  double r = std::fmod(x, p);
  if (r < 0) r += p;
  if (r >= p) r = 0;
  return r;
}

std::vector<double> generate_dual_observations(std::int64_t p, double r, std::size_t count,
                                               const GenerationOptions& opt) {
  if (p < 3 || !is_prime(p)) throw Error(ErrorCode::kNotPrime, "dual observations need an odd prime p");
  if (!(r > 0)) throw Error(ErrorCode::kInvalidArgument, "width r must be positive");
  const double stddev = std::sqrt(static_cast<double>(p)) * r / std::sqrt(2 * std::numbers::pi);
  std::vector<double> out(count);
  parallel_for(count, opt.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> e(static_cast<std::size_t>(p));
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opt.seed, stream_id(StreamTag::kDual, opt.first_index + i));
      std::normal_distribution<double> normal(0.0, stddev);
      for (double& v : e) v = normal(rng);
      out[i] = reduce_circle(dual_epsilon0(e), static_cast<double>(p));
    }
  });
  return out;
}

IntVector ring_one(const FieldGeometry& geometry) {
  const int n = geometry.degree();
  Vector<double> target = Vector<double>::Zero(n);
  if (geometry.field.totally_real()) {
    target.setOnes();
  } else {
    target.head(n / 2).setConstant(std::sqrt(2.0));
  }
  return babai_nearest_plane<double>(geometry.lattice, target).z;
}

std::int64_t ramified_reduce(const IntVector& coeffs, std::int64_t p) {
  std::int64_t acc = 0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) acc = (acc + coeffs(i) % p) % p;
  return acc < 0 ? acc + p : acc;
}

SwitchedSample modulus_switch(const LatticeBundle<double>& L, const RlweSample& sample, std::int64_t q,
                              std::int64_t p, double tau, Stream& rng) {
  if (p > q) throw Error(ErrorCode::kInvalidArgument, "modulus switching needs p <= q");
  if (!(tau > 0)) throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  const double alpha = static_cast<double>(p) / static_cast<double>(q);
  SwitchedSample out;
  auto round_one = [&](const IntVector& x, IntVector& lift, Vector<double>& err, IntVector& scaled) {
    Vector<double> scaled_coords = alpha * x.cast<double>();
    Vector<double> center = L.A * scaled_coords;
    lift = sample_lattice_gaussian<double>(L, tau, &center, rng);
    err = scaled_coords - lift.cast<double>();
    scaled = p * x - q * lift;
  };
  round_one(sample.a, out.a_lift, out.a_err, out.a_err_scaled);
  round_one(sample.b, out.b_lift, out.b_err, out.b_err_scaled);
  out.sample.a = reduce_mod(out.a_lift, p);
  out.sample.b = reduce_mod(out.b_lift, p);
  return out;
}

std::vector<SwitchedSample> modulus_switch_all(const LatticeBundle<double>& L, const std::vector<RlweSample>& samples,
                                               std::int64_t q, std::int64_t p, double tau,
                                               const GenerationOptions& opt) {
  std::vector<SwitchedSample> out(samples.size());
  parallel_for(samples.size(), opt.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opt.seed, stream_id(StreamTag::kSwitch, opt.first_index + i));
      out[i] = modulus_switch(L, samples[i], q, p, tau, rng);
    }
  });
  return out;
}

IntVector reduce_mod(const IntVector& x, std::int64_t q) {
  return x.unaryExpr([q](std::int64_t v) {
    std::int64_t r = v % q;
    return r < 0 ? r + q : r;
  });
}

IntVector centered_mod(const IntVector& x, std::int64_t q) {
  return x.unaryExpr([q](std::int64_t v) {
    std::int64_t r = v % q;
    if (r < 0) r += q;
    return r > q / 2 ? r - q : r;
  });
}

}  // namespace rlwe
