#include "rlwe/finite_field.hpp"

#include <algorithm>
#include <sstream>

#include "rlwe/cyclo_group.hpp"
#include "rlwe/errors.hpp"

namespace rlwe {

namespace {

using Poly = std::vector<std::uint32_t>;  // low coefficient first, trimmed

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t q) {
  return static_cast<std::uint32_t>(mod_inverse(a, q));
}

// Remainder of a modulo b over F_q (b nonzero).
Poly poly_mod(Poly a, const Poly& b, std::uint32_t q) {
  trim(a);
  std::uint64_t lead_inv = inv_mod(b.back(), q);
  while (a.size() >= b.size()) {
    std::uint64_t factor = a.back() * lead_inv % q;
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      std::uint64_t sub = factor * b[i] % q;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + q - sub) % q);
    }
    trim(a);
  }
  return a;
}

Poly poly_gcd(Poly a, Poly b, std::uint32_t q) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(a, b, q);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace

ExtensionField::ExtensionField(std::uint32_t q, std::vector<std::uint32_t> modulus)
    : q_(q), k_(static_cast<int>(modulus.size()) - 1), modulus_(std::move(modulus)) {
  if (!is_prime(q) || q >= (1U << 31)) throw Error(ErrorCode::kNotPrime, "field characteristic must be a prime below 2^31");
  if (k_ < 1 || k_ > kMaxExtensionDegree)
    throw Error(ErrorCode::kUnsupportedContext, "extension degree " + std::to_string(k_) + " out of range");
  if (modulus_.back() != 1) throw Error(ErrorCode::kInvalidArgument, "field modulus must be monic");
}

ExtensionField ExtensionField::create(std::uint32_t q, int k) {
  if (!is_prime(q)) throw Error(ErrorCode::kNotPrime, std::to_string(q) + " is not prime");
  if (k < 1 || k > kMaxExtensionDegree)
    throw Error(ErrorCode::kUnsupportedContext, "extension degree " + std::to_string(k) + " out of range");
  Poly g(static_cast<std::size_t>(k) + 1, 0);
  g[k] = 1;
  // Walk the low coefficients as a base-q counter; the first irreducible hit
  // is the least one.
  while (true) {
    if (is_irreducible(q, g)) return ExtensionField(q, g);
    int i = 0;
    while (i < k && ++g[i] == q) g[i++] = 0;
    if (i == k) throw Error(ErrorCode::kConvergenceFailure, "no irreducible polynomial found");
  }
}

bool is_irreducible(std::uint32_t q, const std::vector<std::uint32_t>& monic) {
  int k = static_cast<int>(monic.size()) - 1;
  if (k == 1) return true;
  if (monic[0] == 0) return false;
  ExtensionField ring(q, monic);  // arithmetic modulo g, valid for any monic g
  FieldElement t{};
  t.c[1] = 1;
  // x^{q^i} mod g for i = 1..k
  std::vector<FieldElement> frob(static_cast<std::size_t>(k) + 1);
  frob[0] = t;
  for (int i = 1; i <= k; ++i) frob[i] = ring.pow(frob[i - 1], static_cast<std::uint64_t>(q));
  if (!(frob[k] == t)) return false;
  for (std::int64_t r : prime_factors(k)) {
    FieldElement d = ring.sub(frob[k / r], t);
    Poly dp(d.c.begin(), d.c.begin() + k);
    Poly gcd = poly_gcd(monic, dp, q);
    if (gcd.size() != 1) return false;
  }
  return true;
}

BigInt ExtensionField::order() const {
  BigInt r = 1;
  for (int i = 0; i < k_; ++i) r *= q_;
  return r;
}

FieldElement ExtensionField::one() const {
  FieldElement r{};
  r.c[0] = 1;
  return r;
}

FieldElement ExtensionField::from_int(std::int64_t v) const {
  FieldElement r{};
  std::int64_t m = v % static_cast<std::int64_t>(q_);
  if (m < 0) m += q_;
  r.c[0] = static_cast<std::uint32_t>(m);
  return r;
}

FieldElement ExtensionField::from_index(std::uint64_t idx) const {
  FieldElement r{};
  for (int i = 0; i < k_ && idx > 0; ++i) {
    r.c[i] = static_cast<std::uint32_t>(idx % q_);
    idx /= q_;
  }
  return r;
}

std::uint64_t ExtensionField::to_index(const FieldElement& x) const {
  std::uint64_t r = 0;
  for (int i = k_ - 1; i >= 0; --i) r = r * q_ + x.c[i];
  return r;
}

FieldElement ExtensionField::add(const FieldElement& a, const FieldElement& b) const {
  FieldElement r{};
  for (int i = 0; i < k_; ++i) {
    std::uint32_t s = a.c[i] + b.c[i];
    r.c[i] = s >= q_ ? s - q_ : s;
  }
  return r;
}

FieldElement ExtensionField::sub(const FieldElement& a, const FieldElement& b) const {
  FieldElement r{};
  for (int i = 0; i < k_; ++i) r.c[i] = a.c[i] >= b.c[i] ? a.c[i] - b.c[i] : a.c[i] + q_ - b.c[i];
  return r;
}

FieldElement ExtensionField::neg(const FieldElement& a) const { return sub(zero(), a); }

FieldElement ExtensionField::mul(const FieldElement& a, const FieldElement& b) const {
  std::array<std::uint64_t, 2 * kMaxExtensionDegree> prod{};
  const std::uint64_t q = q_;
  for (int i = 0; i < k_; ++i) {
    if (a.c[i] == 0) continue;
    for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + std::uint64_t{a.c[i]} * b.c[j]) % q;
  }
  for (int i = 2 * k_ - 2; i >= k_; --i) {
    std::uint64_t coef = prod[i];
    if (coef == 0) continue;
    prod[i] = 0;
    for (int j = 0; j < k_; ++j) {
      prod[i - k_ + j] = (prod[i - k_ + j] + (q - coef) * modulus_[j]) % q;
    }
  }
  FieldElement r{};
  for (int i = 0; i < k_; ++i) r.c[i] = static_cast<std::uint32_t>(prod[i]);
  return r;
}

FieldElement ExtensionField::scale(const FieldElement& a, std::uint32_t s) const {
  FieldElement r{};
  for (int i = 0; i < k_; ++i) r.c[i] = static_cast<std::uint32_t>(std::uint64_t{a.c[i]} * s % q_);
  return r;
}

FieldElement ExtensionField::pow(const FieldElement& a, std::uint64_t e) const {
  FieldElement result = one();
  FieldElement base = a;
  while (e > 0) {
    if (e & 1U) result = mul(result, base);
    e >>= 1;
    if (e > 0) base = mul(base, base);
  }
  return result;
}

FieldElement ExtensionField::pow(const FieldElement& a, const BigInt& e) const {
  if (e < 0) throw Error(ErrorCode::kInvalidArgument, "negative exponent");
  FieldElement result = one();
  std::size_t bits = e == 0 ? 0 : boost::multiprecision::msb(e) + 1;
  for (std::size_t i = bits; i-- > 0;) {
    result = mul(result, result);
    if (boost::multiprecision::bit_test(e, static_cast<unsigned>(i))) result = mul(result, a);
  }
  return result;
}

FieldElement ExtensionField::frobenius(const FieldElement& a, int times) const {
  FieldElement r = a;
  for (int i = 0; i < times % k_; ++i) r = pow(r, static_cast<std::uint64_t>(q_));
  return r;
}

FieldElement ExtensionField::inverse(const FieldElement& a) const {
  if (is_zero(a)) throw Error(ErrorCode::kZeroElement, "inverse of zero");
  return pow(a, order() - 2);
}

std::string ExtensionField::to_string(const FieldElement& a) const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < k_; ++i) os << (i ? "," : "") << a.c[i];
  os << ']';
  return os.str();
}

bool has_exact_order(const ExtensionField& F, const FieldElement& x, const BigInt& order,
                     const std::vector<BigInt>& order_primes) {
  if (F.is_zero(x)) return false;
  if (!(F.pow(x, order) == F.one())) return false;
  for (const BigInt& r : order_primes) {
    if (F.pow(x, BigInt(order / r)) == F.one()) return false;
  }
  return true;
}

IndexedField::IndexedField(ExtensionField field)
    : field_(std::move(field)), q_(field_.characteristic()), k_(field_.degree()) {
  BigInt order = field_.order();
  if (order > kMaxIndexedFieldSize)
    throw Error(ErrorCode::kUnsupportedContext, "field of size " + order.str() + " is too large to index");
  size_ = order.convert_to<std::uint32_t>();
  pow_q_.resize(static_cast<std::size_t>(k_) + 1);
  pow_q_[0] = 1;
  for (int i = 1; i <= k_; ++i) pow_q_[i] = pow_q_[i - 1] * q_;

  std::uint32_t group = size_ - 1;
  std::vector<BigInt> primes;
  for (std::int64_t r : prime_factors(group)) primes.emplace_back(r);
  std::uint32_t gen = 0;
  for (std::uint32_t idx = 1; idx < size_; ++idx) {
    if (group == 1 || has_exact_order(field_, field_.from_index(idx), BigInt(group), primes)) {
      gen = idx;
      break;
    }
  }
  log_.assign(size_, 0);
  exp_.assign(size_, 0);
  FieldElement g = field_.from_index(gen);
  FieldElement x = field_.one();
  for (std::uint32_t e = 0; e < group; ++e) {
    auto idx = static_cast<std::uint32_t>(field_.to_index(x));
    exp_[e] = idx;
    log_[idx] = e;
    x = field_.mul(x, g);
  }
  exp_[group] = exp_[0];
}

std::uint32_t IndexedField::add(std::uint32_t a, std::uint32_t b) const {
  if (k_ == 1) {
    std::uint32_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint32_t r = 0;
  for (int i = 0; i < k_; ++i) {
    std::uint32_t s = a % q_ + b % q_;
    if (s >= q_) s -= q_;
    r += s * pow_q_[i];
    a /= q_;
    b /= q_;
  }
  return r;
}

std::uint32_t IndexedField::sub(std::uint32_t a, std::uint32_t b) const {
  std::uint32_t r = 0;
  for (int i = 0; i < k_; ++i) {
    std::uint32_t x = a % q_;
    std::uint32_t y = b % q_;
    r += (x >= y ? x - y : x + q_ - y) * pow_q_[i];
    a /= q_;
    b /= q_;
  }
  return r;
}

std::uint32_t IndexedField::inv(std::uint32_t a) const {
  if (a == 0) throw Error(ErrorCode::kZeroElement, "inverse of zero");
  std::uint32_t l = log_[a];
  return exp_[l == 0 ? 0 : size_ - 1 - l];
}

std::uint32_t IndexedField::frobenius(std::uint32_t a, int times) const {
  if (a == 0) return 0;
  std::uint64_t e = log_[a];
  for (int i = 0; i < times % k_; ++i) e = e * q_ % (size_ - 1);
  return exp_[e];
}

bool IndexedField::is_full_degree(std::uint32_t a) const {
  for (std::int64_t r : prime_factors(k_)) {
    if (in_subfield(a, k_ / static_cast<int>(r))) return false;
  }
  return true;
}

std::array<std::uint32_t, kMaxExtensionDegree> IndexedField::coords(std::uint32_t a) const {
  std::array<std::uint32_t, kMaxExtensionDegree> c{};
  for (int i = 0; i < k_; ++i) {
    c[i] = a % q_;
    a /= q_;
  }
  return c;
}

std::uint32_t IndexedField::from_coords(const std::uint32_t* coords) const {
  std::uint32_t r = 0;
  for (int i = 0; i < k_; ++i) r += coords[i] * pow_q_[i];
  return r;
}

}  // namespace rlwe
