#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "rlwe/attacks.hpp"
#include "rlwe/finite_field.hpp"
#include "rlwe/residue.hpp"
#include "rlwe/rlwe.hpp"

using rlwe::ErrorCode;
using rlwe::ExtensionField;
using rlwe::FieldElement;
using rlwe::IntVector;
using rlwe::ResidueContext;
using rlwe::Stream;
using rlwe::SubgroupDescriptor;

namespace {

const SubgroupDescriptor& field_3003() {
  static const SubgroupDescriptor H = SubgroupDescriptor::create(3003, {2276, 2729, 1123});
  return H;
}

const ResidueContext& ctx_3003() {
  static const ResidueContext ctx = ResidueContext::build(field_3003(), 131);
  return ctx;
}

std::span<const std::int64_t> as_span(const IntVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

TEST_CASE("extension field arithmetic") {
  auto F = ExtensionField::create(3, 4);
  CHECK(rlwe::is_irreducible(3, F.modulus()));
  // No smaller monic quartic (in the base-q order) is irreducible.
  std::uint64_t idx = 0;
  for (int i = 0; i < 4; ++i) idx = idx * 3 + F.modulus()[3 - i];
  for (std::uint64_t j = 0; j < idx; ++j) {
    std::vector<std::uint32_t> g(5, 0);
    std::uint64_t t = j;
    for (int i = 0; i < 4; ++i, t /= 3) g[i] = static_cast<std::uint32_t>(t % 3);
    g[4] = 1;
    CHECK_FALSE(rlwe::is_irreducible(3, g));
  }
  for (std::uint64_t a = 1; a < 81; ++a) {
    FieldElement x = F.from_index(a);
    CHECK(F.mul(x, F.inverse(x)) == F.one());
    CHECK(F.frobenius(x) == F.pow(x, std::uint64_t{3}));
    CHECK(F.pow(x, std::uint64_t{80}) == F.one());
    CHECK(F.to_index(x) == a);
  }
}

TEST_CASE("the 3003 context at q = 131") {
  const auto& ctx = ctx_3003();
  const auto& F = ctx.big_field();
  CHECK(ctx.residue_degree() == 2);
  CHECK(ctx.reduction_vector().size() == 30);
  for (const auto& x : ctx.reduction_vector()) {
    CHECK(F.frobenius(x, 2) == x);
  }
  // zeta has exact order 3003.
  CHECK(F.pow(ctx.zeta(), std::uint64_t{3003}) == F.one());
  for (std::int64_t p : {3, 7, 11, 13}) CHECK_FALSE(F.pow(ctx.zeta(), static_cast<std::uint64_t>(3003 / p)) == F.one());
  // The sum of the primitive roots is mu(3003).
  FieldElement total = F.zero();
  for (std::int64_t u : oracle::units(3003)) total = F.add(total, ctx.zeta_power(u));
  CHECK(total == F.from_int(oracle::moebius(3003)));
}

TEST_CASE("15 prime ideals above 131") {
  const auto& ctx = ctx_3003();
  const auto& F = ctx.big_field();
  std::set<std::vector<std::uint64_t>> classes;
  for (std::int64_t c : field_3003().cosets()) {
    auto v = ctx.twisted_reduction_vector(c);
    std::vector<std::uint64_t> key, conj;
    for (const auto& x : v) {
      key.push_back(F.to_index(x));
      conj.push_back(F.to_index(F.frobenius(x)));
    }
    classes.insert(std::min(key, conj));
  }
  CHECK(classes.size() == 15);
}

TEST_CASE("full-degree elements of F_{131^2}") {
  const auto& ctx = ctx_3003();
  std::uint32_t full = 0;
  for (std::uint32_t i = 0; i < ctx.subfield().size(); ++i) {
    full += ctx.is_full_degree(ctx.embed(i)) ? 1 : 0;
  }
  CHECK(ctx.subfield().size() == 131u * 131u);
  CHECK(full == 17030);
  CHECK_FALSE(ctx.is_full_degree(ctx.big_field().from_int(5)));
}

TEST_CASE("split primes and the Moebius identity for m = 15") {
  auto H = SubgroupDescriptor::create(15, {1});
  auto ctx = ResidueContext::build(H, 31);  // 31 = 1 mod 15
  CHECK(ctx.cyclotomic_degree() == 1);
  CHECK(ctx.residue_degree() == 1);
  const auto& F = ctx.big_field();
  FieldElement total = F.zero();
  for (std::int64_t u : oracle::units(15)) total = F.add(total, ctx.zeta_power(u));
  CHECK(total == F.one());
  for (const auto& x : ctx.reduction_vector()) CHECK(F.frobenius(x) == x);
}

TEST_CASE("residue field matches a Frobenius scan of the big field") {
  // 3 has order 12 mod 35, so the residue field sits inside F_{3^12}.
  auto H = SubgroupDescriptor::create(35, {6});
  auto ctx = ResidueContext::build(H, 3);
  const int f = ctx.residue_degree();
  const auto& F = ctx.big_field();
  auto fixed = rlwe::frobenius_fixed_points(F, f);
  std::set<std::uint64_t> scan;
  for (const auto& x : fixed) scan.insert(F.to_index(x));
  std::set<std::uint64_t> mine;
  for (std::uint32_t i = 0; i < ctx.subfield().size(); ++i) {
    auto x = ctx.embed(i);
    mine.insert(F.to_index(x));
    CHECK(ctx.to_index(x) == i);
  }
  CHECK(scan.size() == ctx.subfield().size());
  CHECK(mine == scan);
  if (ctx.cyclotomic_degree() > f) {
    // Something outside the subfield.
    FieldElement outside = ctx.zeta();
    CHECK_THROWS_AS(ctx.to_index(outside), rlwe::Error);
    try {
      ctx.is_full_degree(outside);
      FAIL("expected NotInSubfield");
    } catch (const rlwe::Error& e) {
      CHECK(e.code() == ErrorCode::kNotInSubfield);
    }
  }
}

TEST_CASE("build errors") {
  try {
    ResidueContext::build(field_3003(), 7);
    FAIL("expected RamifiedPrime");
  } catch (const rlwe::Error& e) {
    CHECK(e.code() == ErrorCode::kRamifiedPrime);
  }
}

TEST_CASE("twists compose") {
  const auto& H = field_3003();
  const auto& ctx = ctx_3003();
  CHECK(ctx.twisted_reduction_vector(1) == ctx.reduction_vector());
  const auto base = ctx.reduction_vector();
  for (std::int64_t c : {H.cosets()[1], H.cosets()[5]}) {
    auto v = ctx.twisted_reduction_vector(c);
    for (int i = 0; i < H.degree(); ++i) CHECK(v[i] == base[H.coset_index(H.cosets()[i] * c % 3003)]);
    for (std::int64_t c2 : {H.cosets()[2], H.cosets()[7]}) {
      // Twisting the twisted map again.
      auto twice = ctx.twisted_reduction_vector(H.coset_of(c * c2 % 3003));
      for (int i = 0; i < H.degree(); ++i) {
        CHECK(twice[i] == v[H.coset_index(H.cosets()[i] * c2 % 3003)]);
      }
    }
  }
}

TEST_CASE("reduction is a ring homomorphism") {
  auto H = SubgroupDescriptor::create(285, {16, 41});
  auto geometry = rlwe::build_field_geometry(H);
  oracle::StructureConstants exact(H);
  auto ctx = ResidueContext::build(H, 11);
  const auto& F = ctx.subfield();
  const int n = H.degree();
  Stream rng(21, 0);
  std::uniform_int_distribution<std::int64_t> coef(-30, 30);
  CHECK(ctx.reduce_to_index(std::vector<std::int64_t>(n, 0)) == 0);
  for (int t = 0; t < 100; ++t) {
    IntVector x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = coef(rng);
      y(i) = coef(rng);
    }
    IntVector xy = geometry->ring->multiply(x, y);
    std::vector<std::int64_t> xv(x.data(), x.data() + n), yv(y.data(), y.data() + n);
    auto ref = exact.multiply(xv, yv);
    CHECK(std::vector<std::int64_t>(xy.data(), xy.data() + n) == ref);
    for (std::int64_t twist : rlwe::prime_twists(H, 11)) {
      auto rx = ctx.reduce_to_index(as_span(x), twist);
      auto ry = ctx.reduce_to_index(as_span(y), twist);
      CHECK(ctx.reduce_to_index(as_span(xy), twist) == F.mul(rx, ry));
      IntVector sum = x + y;
      CHECK(ctx.reduce_to_index(as_span(sum), twist) == F.add(rx, ry));
    }
  }
}
