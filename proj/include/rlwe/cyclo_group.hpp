#pragma once

// Subgroups H of (Z/mZ)^* and the Galois combinatorics of the fixed field
// K = Q(zeta_m)^H, for m odd and squarefree.

#include <cstdint>
#include <span>
#include <vector>

namespace rlwe {

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t mod_pow(std::int64_t base, std::uint64_t exp, std::int64_t mod);
std::int64_t mod_inverse(std::int64_t a, std::int64_t mod);
bool is_prime(std::int64_t n);
bool is_squarefree(std::int64_t n);
std::vector<std::int64_t> prime_factors(std::int64_t n);
std::int64_t euler_phi(std::int64_t n);
int moebius(std::int64_t n);
std::vector<std::int64_t> primes_between(std::int64_t lo, std::int64_t hi);

/// The pair (m, H) together with the coset decomposition of (Z/mZ)^* / H.
///
/// Coset representatives are the least positive integer of each class, taken
/// in increasing order.  When -1 is not in H they are then reordered as
/// [c_1, ..., c_{n/2}, m - c_1, ..., m - c_{n/2}] so complex-conjugate
/// embeddings sit at mirrored positions; the kept c_i are the first classes
/// met in increasing order whose conjugate has not been kept already.
class SubgroupDescriptor {
 public:
  static SubgroupDescriptor create(std::int64_t m, std::vector<std::int64_t> generators);

  std::int64_t modulus() const { return m_; }
  const std::vector<std::int64_t>& generators() const { return gens_; }
  /// Elements of H, ascending.
  const std::vector<std::int64_t>& elements() const { return elements_; }
  std::int64_t order() const { return static_cast<std::int64_t>(elements_.size()); }
  int degree() const { return static_cast<int>(cosets_.size()); }
  const std::vector<std::int64_t>& cosets() const { return cosets_; }
  bool totally_real() const { return totally_real_; }

  bool contains(std::int64_t a) const;
  bool is_unit(std::int64_t a) const;

  std::int64_t coset_of(std::int64_t a) const;
  /// Position of coset_of(a) in cosets().
  int coset_index(std::int64_t a) const;

  int residue_degree(std::int64_t q) const;

  /// perm[i] = coset_index(cosets()[i] * c).
  std::vector<int> galois_permutation(std::int64_t c) const;

  /// Degree over Q of z = sum_c coeffs[c] w_c.
  int extension_degree(std::span<const std::int64_t> coeffs) const;

  std::vector<std::int64_t> degree_f_primes(std::int64_t lo, std::int64_t hi, int f) const;

 private:
  std::int64_t reduce(std::int64_t a) const;

  std::int64_t m_ = 0;
  std::vector<std::int64_t> gens_;
  std::vector<std::int64_t> elements_;
  std::vector<std::int64_t> cosets_;
  std::vector<char> in_h_;
  std::vector<int> coset_index_;  // -1 for non-units
  bool totally_real_ = false;
};

}  // namespace rlwe
