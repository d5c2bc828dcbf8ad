#pragma once

// Arithmetic in F_{q^k} = F_q[t]/(g(t)) for small prime q and k <= 24, plus an
// index-addressed variant with log tables for fields small enough to scan.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rlwe {

inline constexpr int kMaxExtensionDegree = 24;
inline constexpr std::uint64_t kMaxIndexedFieldSize = 1ULL << 22;

using BigInt = boost::multiprecision::cpp_int;

/// Polynomial of degree < k over F_q, low coefficient first.
struct FieldElement {
  std::array<std::uint32_t, kMaxExtensionDegree> c{};
  bool operator==(const FieldElement&) const = default;
};

class ExtensionField {
 public:
  /// F_q[t]/(g) with g the least monic irreducible polynomial of degree k,
  /// polynomials being ordered by the integer sum_{i<k} g_i q^i.
  static ExtensionField create(std::uint32_t q, int k);
  /// g given as k+1 coefficients, low first, monic and irreducible.
  ExtensionField(std::uint32_t q, std::vector<std::uint32_t> modulus);

  std::uint32_t characteristic() const { return q_; }
  int degree() const { return k_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  /// q^k as a big integer.
  BigInt order() const;

  FieldElement zero() const { return {}; }
  FieldElement one() const;
  FieldElement from_int(std::int64_t v) const;
  /// The element whose coefficients are the base-q digits of idx.
  FieldElement from_index(std::uint64_t idx) const;
  std::uint64_t to_index(const FieldElement& x) const;

  FieldElement add(const FieldElement& a, const FieldElement& b) const;
  FieldElement sub(const FieldElement& a, const FieldElement& b) const;
  FieldElement neg(const FieldElement& a) const;
  FieldElement mul(const FieldElement& a, const FieldElement& b) const;
  FieldElement scale(const FieldElement& a, std::uint32_t s) const;
  FieldElement pow(const FieldElement& a, const BigInt& e) const;
  FieldElement pow(const FieldElement& a, std::uint64_t e) const;
  /// x -> x^{q^times}.
  FieldElement frobenius(const FieldElement& a, int times = 1) const;
  FieldElement inverse(const FieldElement& a) const;
  bool is_zero(const FieldElement& a) const { return a == FieldElement{}; }

  std::string to_string(const FieldElement& a) const;

 private:
  std::uint32_t q_;
  int k_;
  std::vector<std::uint32_t> modulus_;
};

bool is_irreducible(std::uint32_t q, const std::vector<std::uint32_t>& monic);

/// Multiplicative order test: true iff x has order exactly `order`, given the
/// distinct primes dividing `order`.
bool has_exact_order(const ExtensionField& F, const FieldElement& x, const BigInt& order,
                     const std::vector<BigInt>& order_primes);

/// F_{q^k} addressed by integers in [0, q^k): index = sum_i coeff_i q^i.
/// Multiplication goes through discrete log tables built from the least
/// primitive element.
class IndexedField {
 public:
  explicit IndexedField(ExtensionField field);

  const ExtensionField& field() const { return field_; }
  std::uint32_t characteristic() const { return q_; }
  int degree() const { return k_; }
  std::uint32_t size() const { return size_; }
  std::uint32_t primitive_element() const { return exp_[1]; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t neg(std::uint32_t a) const { return sub(0, a); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (a == 0 || b == 0) return 0;
    std::uint32_t s = log_[a] + log_[b];
    if (s >= size_ - 1) s -= size_ - 1;
    return exp_[s];
  }
  std::uint32_t inv(std::uint32_t a) const;
  std::uint32_t frobenius(std::uint32_t a, int times = 1) const;
  /// Discrete log w.r.t. primitive_element(); a must be nonzero.
  std::uint32_t log(std::uint32_t a) const { return log_[a]; }
  std::uint32_t exp(std::uint32_t e) const { return exp_[e % (size_ - 1)]; }

  /// True iff a^{q^d} = a, i.e. a lies in the subfield F_{q^d}.
  bool in_subfield(std::uint32_t a, int d) const { return frobenius(a, d) == a; }
  /// True iff a lies in no proper subfield.
  bool is_full_degree(std::uint32_t a) const;

  std::array<std::uint32_t, kMaxExtensionDegree> coords(std::uint32_t a) const;
  std::uint32_t from_coords(const std::uint32_t* coords) const;

 private:
  ExtensionField field_;
  std::uint32_t q_;
  int k_;
  std::uint32_t size_;
  std::vector<std::uint32_t> pow_q_;  // q^i
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> exp_;
};

}  // namespace rlwe
