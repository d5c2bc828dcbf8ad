#include "rlwe/residue.hpp"

#include <string>

#include "rlwe/errors.hpp"

namespace rlwe {

namespace {

constexpr std::uint32_t kMaxResidueCharacteristic = 1U << 20;

std::uint32_t inv_mod(std::uint64_t a, std::uint32_t q) {
  return static_cast<std::uint32_t>(mod_inverse(static_cast<std::int64_t>(a % q), q));
}

std::uint32_t reduce_signed(std::int64_t x, std::uint32_t q) {
  std::int64_t r = x % static_cast<std::int64_t>(q);
  return static_cast<std::uint32_t>(r < 0 ? r + q : r);
}

}  // namespace

void ReductionMap::apply(std::span<const std::int64_t> x, std::uint32_t* out) const {
  for (int k = 0; k < f; ++k) {
    const std::uint32_t* row = rows.data() + static_cast<std::size_t>(k) * n;
    std::uint64_t acc = 0;
    for (int c = 0; c < n; ++c) acc += std::uint64_t{reduce_signed(x[c], q)} * row[c];
    out[k] = static_cast<std::uint32_t>(acc % q);
  }
}

ResidueContext ResidueContext::build(const SubgroupDescriptor& H, std::int64_t q) {
  const std::int64_t m = H.modulus();
  if (!is_prime(q)) throw Error(ErrorCode::kNotPrime, std::to_string(q) + " is not prime");
  if (m % q == 0) throw Error(ErrorCode::kRamifiedPrime, std::to_string(q) + " divides " + std::to_string(m));
  if (q >= kMaxResidueCharacteristic)
    throw Error(ErrorCode::kUnsupportedContext, "residue characteristic too large");

  int big_degree = 1;
  for (std::int64_t x = q % m; x != 1 % m; x = x * q % m) {
    if (++big_degree > kMaxExtensionDegree)
      throw Error(ErrorCode::kUnsupportedContext,
                  "order of " + std::to_string(q) + " mod " + std::to_string(m) + " exceeds " +
                      std::to_string(kMaxExtensionDegree));
  }

  ResidueContext ctx;
  ctx.m_ = m;
  ctx.q_ = static_cast<std::uint32_t>(q);
  ctx.f_ = H.residue_degree(q);
  ctx.cosets_ = H.cosets();
  ctx.h_elements_ = H.elements();
  auto big = std::make_shared<ExtensionField>(ExtensionField::create(ctx.q_, big_degree));
  ctx.big_ = big;
  const ExtensionField& F = *big;

  BigInt group = F.order() - 1;
  BigInt zeta_exp = group / m;
  std::vector<BigInt> m_primes;
  for (std::int64_t r : prime_factors(m)) m_primes.emplace_back(r);
  bool found = false;
  for (std::uint64_t idx = 1; !found; ++idx) {
    FieldElement z = F.pow(F.from_index(idx), zeta_exp);
    if (has_exact_order(F, z, BigInt(m), m_primes)) {
      ctx.zeta_ = z;
      found = true;
    }
  }

  auto table = std::make_shared<std::vector<FieldElement>>(static_cast<std::size_t>(m));
  (*table)[0] = F.one();
  for (std::int64_t e = 1; e < m; ++e) (*table)[e] = F.mul((*table)[e - 1], ctx.zeta_);
  ctx.zeta_table_ = table;
  ctx.reduction_ = ctx.twisted_reduction_vector(1);

  // Generator y of F_{q^f}^* inside F_{q^F}.
  const int f = ctx.f_;
  BigInt small_order = 1;
  for (int i = 0; i < f; ++i) small_order *= q;
  if (small_order > kMaxIndexedFieldSize)
    throw Error(ErrorCode::kUnsupportedContext, "residue field of size " + small_order.str() + " is too large");
  std::uint64_t small_group = small_order.convert_to<std::uint64_t>() - 1;
  std::vector<BigInt> small_primes;
  for (std::int64_t r : prime_factors(static_cast<std::int64_t>(small_group))) small_primes.emplace_back(r);
  BigInt y_exp = group / BigInt(small_group);
  FieldElement y{};
  for (std::uint64_t idx = 1;; ++idx) {
    FieldElement cand = F.pow(F.from_index(idx), y_exp);
    if (small_group == 1 || has_exact_order(F, cand, BigInt(small_group), small_primes)) {
      y = cand;
      break;
    }
  }
  ctx.basis_.resize(f);
  ctx.basis_[0] = F.one();
  for (int j = 1; j < f; ++j) ctx.basis_[j] = F.mul(ctx.basis_[j - 1], y);

  // Pick f coordinates on which the basis is independent and invert there.
  const int K = F.degree();
  const std::uint32_t Q = ctx.q_;
  std::vector<std::vector<std::uint32_t>> rows(f, std::vector<std::uint32_t>(K));
  for (int j = 0; j < f; ++j)
    for (int i = 0; i < K; ++i) rows[j][i] = ctx.basis_[j].c[i];
  {
    auto work = rows;
    int r = 0;
    for (int col = 0; col < K && r < f; ++col) {
      int piv = -1;
      for (int i = r; i < f; ++i)
        if (work[i][col] != 0) {
          piv = i;
          break;
        }
      if (piv < 0) continue;
      std::swap(work[r], work[piv]);
      std::uint64_t inv = inv_mod(work[r][col], Q);
      for (auto& v : work[r]) v = static_cast<std::uint32_t>(v * inv % Q);
      for (int i = 0; i < f; ++i) {
        if (i == r || work[i][col] == 0) continue;
        std::uint64_t factor = work[i][col];
        for (int c = 0; c < K; ++c) work[i][c] = static_cast<std::uint32_t>((work[i][c] + (Q - factor) * work[r][c]) % Q);
      }
      ctx.pivot_coord_.push_back(col);
      ++r;
    }
    if (r != f) throw Error(ErrorCode::kConvergenceFailure, "subfield basis is degenerate");
  }
  // S[r][j] = basis_j at coordinate pivot_r; solve_rows_ = S^{-1}.
  std::vector<std::vector<std::uint32_t>> aug(f, std::vector<std::uint32_t>(2 * f, 0));
  for (int r = 0; r < f; ++r) {
    for (int j = 0; j < f; ++j) aug[r][j] = ctx.basis_[j].c[ctx.pivot_coord_[r]];
    aug[r][f + r] = 1;
  }
  for (int col = 0; col < f; ++col) {
    int piv = col;
    while (aug[piv][col] == 0) ++piv;
    std::swap(aug[col], aug[piv]);
    std::uint64_t inv = inv_mod(aug[col][col], Q);
    for (auto& v : aug[col]) v = static_cast<std::uint32_t>(v * inv % Q);
    for (int i = 0; i < f; ++i) {
      if (i == col || aug[i][col] == 0) continue;
      std::uint64_t factor = aug[i][col];
      for (int c = 0; c < 2 * f; ++c) aug[i][c] = static_cast<std::uint32_t>((aug[i][c] + (Q - factor) * aug[col][c]) % Q);
    }
  }
  ctx.solve_rows_.assign(f, std::vector<std::uint32_t>(f));
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) ctx.solve_rows_[i][j] = aug[i][f + j];

  // Minimal polynomial of y: y^f = sum_j a_j y^j.
  FieldElement yf = f == 1 ? y : F.mul(ctx.basis_[f - 1], y);
  std::vector<std::uint32_t> coords(f, 0);
  {
    for (int i = 0; i < f; ++i) {
      std::uint64_t acc = 0;
      for (int r = 0; r < f; ++r) acc += std::uint64_t{ctx.solve_rows_[i][r]} * yf.c[ctx.pivot_coord_[r]] % Q;
      coords[i] = static_cast<std::uint32_t>(acc % Q);
    }
  }
  std::vector<std::uint32_t> g(static_cast<std::size_t>(f) + 1, 0);
  for (int j = 0; j < f; ++j) g[j] = (Q - coords[j]) % Q;
  g[f] = 1;
  ctx.small_ = std::make_shared<IndexedField>(ExtensionField(Q, g));
  // y^f must be reproduced by its coordinates.
  (void)ctx.to_index(yf);
  return ctx;
}

FieldElement ResidueContext::zeta_power(std::int64_t e) const {
  std::int64_t r = e % m_;
  if (r < 0) r += m_;
  return (*zeta_table_)[r];
}

std::vector<FieldElement> ResidueContext::twisted_reduction_vector(std::int64_t c) const {
  if (gcd64(c, m_) != 1) throw Error(ErrorCode::kNonUnit, std::to_string(c) + " is not a unit mod " + std::to_string(m_));
  const ExtensionField& F = *big_;
  std::int64_t cm = c % m_;
  if (cm < 0) cm += m_;
  std::vector<FieldElement> out(cosets_.size());
  for (std::size_t i = 0; i < cosets_.size(); ++i) {
    std::int64_t base = cosets_[i] * cm % m_;
    FieldElement acc{};
    for (std::int64_t h : h_elements_) acc = F.add(acc, (*zeta_table_)[static_cast<std::size_t>(h * base % m_)]);
    out[i] = acc;
  }
  return out;
}

std::vector<std::uint32_t> ResidueContext::twisted_reduction_indices(std::int64_t c) const {
  auto v = twisted_reduction_vector(c);
  std::vector<std::uint32_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_index(v[i]);
  return out;
}

ReductionMap ResidueContext::reduction_map(std::int64_t c) const {
  auto idx = twisted_reduction_indices(c);
  ReductionMap map;
  map.q = q_;
  map.f = f_;
  map.n = degree();
  map.rows.assign(static_cast<std::size_t>(f_) * map.n, 0);
  for (int i = 0; i < map.n; ++i) {
    auto co = small_->coords(idx[i]);
    for (int k = 0; k < f_; ++k) map.rows[static_cast<std::size_t>(k) * map.n + i] = co[k];
  }
  return map;
}

FieldElement ResidueContext::reduce(std::span<const std::int64_t> coeffs, std::int64_t twist) const {
  if (static_cast<int>(coeffs.size()) != degree())
    throw Error(ErrorCode::kInvalidArgument, "coefficient vector has wrong length");
  const ExtensionField& F = *big_;
  auto w = twist == 1 ? reduction_ : twisted_reduction_vector(twist);
  FieldElement acc{};
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    acc = F.add(acc, F.scale(w[i], reduce_signed(coeffs[i], q_)));
  return acc;
}

std::uint32_t ResidueContext::reduce_to_index(std::span<const std::int64_t> coeffs, std::int64_t twist) const {
  return to_index(reduce(coeffs, twist));
}

FieldElement ResidueContext::embed(std::uint32_t index) const {
  if (index >= small_->size()) throw Error(ErrorCode::kInvalidArgument, "subfield index out of range");
  const ExtensionField& F = *big_;
  auto co = small_->coords(index);
  FieldElement acc{};
  for (int j = 0; j < f_; ++j) acc = F.add(acc, F.scale(basis_[j], co[j]));
  return acc;
}

std::uint32_t ResidueContext::to_index(const FieldElement& x) const {
  std::array<std::uint32_t, kMaxExtensionDegree> co{};
  for (int i = 0; i < f_; ++i) {
    std::uint64_t acc = 0;
    for (int r = 0; r < f_; ++r) acc += std::uint64_t{solve_rows_[i][r]} * x.c[pivot_coord_[r]] % q_;
    co[i] = static_cast<std::uint32_t>(acc % q_);
  }
  std::uint32_t idx = small_ ? small_->from_coords(co.data()) : 0;
  FieldElement back{};
  const ExtensionField& F = *big_;
  for (int j = 0; j < f_; ++j) back = F.add(back, F.scale(basis_[j], co[j]));
  if (!(back == x)) throw Error(ErrorCode::kNotInSubfield, "element is not in the residue field");
  return idx;
}

bool ResidueContext::is_full_degree(const FieldElement& x) const {
  if (!(big_->frobenius(x, f_) == x)) {
    throw Error(ErrorCode::kNotInSubfield, "element is not in the residue field");
  }
  return residue_field_degree(*big_, x) == f_;
}

int residue_field_degree(const ExtensionField& F, const FieldElement& x) {
  FieldElement y = x;
  for (int d = 1; d <= F.degree(); ++d) {
    y = F.pow(y, static_cast<std::uint64_t>(F.characteristic()));
    if (y == x) return d;
  }
  return F.degree();
}

std::vector<FieldElement> frobenius_fixed_points(const ExtensionField& F, int f) {
  BigInt size = F.order();
  if (size > kMaxIndexedFieldSize) throw Error(ErrorCode::kUnsupportedContext, "field too large to scan");
  auto total = size.convert_to<std::uint64_t>();
  std::vector<FieldElement> out;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    FieldElement x = F.from_index(idx);
    if (F.frobenius(x, f) == x) out.push_back(x);
  }
  return out;
}

}  // namespace rlwe
