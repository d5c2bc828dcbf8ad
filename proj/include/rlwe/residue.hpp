#pragma once

// Reduction of O_K modulo a prime P above q, with K = Q(zeta_m)^H.
//
// zeta is a primitive m-th root of unity in F_{q^F}, F the order of q mod m.
// The image of w_c under O_K -> O_K/P is sum_{h in H} zeta^{hc}, which lies in
// the degree-f subfield F_{q^f}.  Residues are reported as indices into an
// IndexedField for F_{q^f}; the subfield is identified with F_q[y] for a fixed
// generator y of its multiplicative group.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rlwe/cyclo_group.hpp"
#include "rlwe/finite_field.hpp"
#include "rlwe/real.hpp"

namespace rlwe {

/// F_q-linear map Z^n -> F_{q^f}, stored as f rows of length n: the residue of
/// sum_c x_c w_c has k-th coordinate sum_c x_c rows[k][c] (mod q).
struct ReductionMap {
  std::uint32_t q = 0;
  int f = 0;
  int n = 0;
  std::vector<std::uint32_t> rows;  // f * n, row-major

  std::uint32_t at(int k, int c) const { return rows[static_cast<std::size_t>(k) * n + c]; }
  /// Coordinates of the residue, written to out[0..f).
  void apply(std::span<const std::int64_t> x, std::uint32_t* out) const;
};

class ResidueContext {
 public:
  /// Throws RamifiedPrime if q | m and UnsupportedContext if F exceeds the
  /// supported extension degree or q^f is too large to index.
  static ResidueContext build(const SubgroupDescriptor& H, std::int64_t q);

  std::int64_t modulus() const { return m_; }
  std::uint32_t q() const { return q_; }
  int residue_degree() const { return f_; }
  int cyclotomic_degree() const { return big_->degree(); }
  int degree() const { return static_cast<int>(cosets_.size()); }

  const ExtensionField& big_field() const { return *big_; }
  const FieldElement& zeta() const { return zeta_; }
  /// zeta^e for any integer e.
  FieldElement zeta_power(std::int64_t e) const;
  const IndexedField& subfield() const { return *small_; }

  /// Residues of w_{c_i}, as elements of F_{q^F}.
  const std::vector<FieldElement>& reduction_vector() const { return reduction_; }
  /// Residues of w_{c c_i}: reduction modulo the conjugate prime sigma_c^{-1}(P).
  std::vector<FieldElement> twisted_reduction_vector(std::int64_t c) const;
  /// Same vector as subfield indices.
  std::vector<std::uint32_t> twisted_reduction_indices(std::int64_t c) const;
  ReductionMap reduction_map(std::int64_t c = 1) const;

  FieldElement reduce(std::span<const std::int64_t> coeffs, std::int64_t twist = 1) const;
  std::uint32_t reduce_to_index(std::span<const std::int64_t> coeffs, std::int64_t twist = 1) const;

  /// Subfield index <-> element of F_{q^F}.  to_index throws NotInSubfield.
  FieldElement embed(std::uint32_t index) const;
  std::uint32_t to_index(const FieldElement& x) const;

  /// True iff x lies in no proper subfield of F_{q^f}.  Throws NotInSubfield
  /// when x is not in F_{q^f} at all.
  bool is_full_degree(const FieldElement& x) const;

 private:
  std::int64_t m_ = 0;
  std::uint32_t q_ = 0;
  int f_ = 0;
  std::vector<std::int64_t> cosets_;
  std::vector<std::int64_t> h_elements_;
  std::shared_ptr<const ExtensionField> big_;
  std::shared_ptr<const IndexedField> small_;
  FieldElement zeta_{};
  std::shared_ptr<const std::vector<FieldElement>> zeta_table_;  // zeta^0..zeta^{m-1}
  std::vector<FieldElement> reduction_;
  std::vector<FieldElement> basis_;  // y^0 .. y^{f-1} in F_{q^F}
  // Row echelon data used by to_index: pivot positions and reduced rows.
  std::vector<int> pivot_coord_;
  std::vector<std::vector<std::uint32_t>> solve_rows_;
};

/// Degree f = [O_K/P : F_q] of a coefficient vector's residue: the least d
/// with x^{q^d} = x.
int residue_field_degree(const ExtensionField& F, const FieldElement& x);

/// All subfield elements of F_{q^F} of degree dividing f, found by scanning
/// the whole field for Frobenius fixed points.  Only practical for tiny q^F;
/// used to cross-check ResidueContext.
std::vector<FieldElement> frobenius_fixed_points(const ExtensionField& F, int f);

}  // namespace rlwe
