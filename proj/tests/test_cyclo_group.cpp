#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "oracles.hpp"
#include "rlwe/cyclo_group.hpp"
#include "rlwe/errors.hpp"

using rlwe::ErrorCode;
using rlwe::SubgroupDescriptor;

namespace {

const SubgroupDescriptor& field_3003() {
  static const SubgroupDescriptor H = SubgroupDescriptor::create(3003, {2276, 2729, 1123});
  return H;
}

const SubgroupDescriptor& field_2805() {
  static const SubgroupDescriptor H = SubgroupDescriptor::create(2805, {1684, 1618});
  return H;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const rlwe::Error& e) {
    return e.code();
  }
  FAIL("expected an rlwe::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("degrees of the reference fields") {
  CHECK(field_3003().degree() == 30);
  CHECK(field_2805().degree() == 40);
  for (std::int64_t m : {3, 15, 105, 285}) {
    auto H = SubgroupDescriptor::create(m, {1});
    CHECK(H.order() == 1);
    CHECK(H.degree() == rlwe::euler_phi(m));
  }
}

TEST_CASE("construction errors") {
  CHECK(code_of([] { SubgroupDescriptor::create(12, {5}); }) == ErrorCode::kBadModulus);
  CHECK(code_of([] { SubgroupDescriptor::create(45, {2}); }) == ErrorCode::kBadModulus);
  CHECK(code_of([] { SubgroupDescriptor::create(15, {3}); }) == ErrorCode::kNonUnitGenerator);
  CHECK(code_of([] { field_3003().coset_of(7); }) == ErrorCode::kNonUnit);
}

TEST_CASE("H is the closure of its generators") {
  for (const auto* H : {&field_3003(), &field_2805()}) {
    auto ref = oracle::closure(H->modulus(), H->generators());
    std::vector<std::int64_t> expect(ref.begin(), ref.end());
    CHECK(H->elements() == expect);
    CHECK(H->order() * H->degree() == rlwe::euler_phi(H->modulus()));
  }
}

TEST_CASE("coset_of partitions the units of 3003 into 30 classes of 48") {
  const auto& H = field_3003();
  auto inH = oracle::closure(3003, H.generators());
  std::map<std::int64_t, int> sizes;
  for (std::int64_t u : oracle::units(3003)) {
    std::int64_t c = H.coset_of(u);
    ++sizes[c];
    std::int64_t quotient = u * rlwe::mod_inverse(c, 3003) % 3003;
    CHECK(inH.count(quotient) == 1);
  }
  CHECK(sizes.size() == 30);
  for (auto [c, count] : sizes) CHECK(count == 48);
  for (std::int64_t h : H.elements()) CHECK(H.coset_of(h) == H.coset_of(1));
  for (std::int64_t c : H.cosets()) CHECK(H.coset_of(c) == c);
}

TEST_CASE("coset ordering pairs complex conjugates") {
  for (const auto* H : {&field_3003(), &field_2805()}) {
    const auto& c = H->cosets();
    const int n = H->degree();
    CHECK(H->totally_real() == H->contains(H->modulus() - 1));
    if (!H->totally_real()) {
      for (int i = 0; i < n / 2; ++i) CHECK(c[i + n / 2] == H->coset_of(H->modulus() - c[i]));
    }
  }
  auto real = SubgroupDescriptor::create(15, {14});
  CHECK(real.totally_real());
}

TEST_CASE("residue degrees") {
  CHECK(field_3003().residue_degree(131) == 2);
  CHECK(field_2805().residue_degree(67) == 2);
  // 3004 + 1 = 3005 is not prime; 6007 = 2 * 3003 + 1 is.
  CHECK(rlwe::is_prime(6007));
  CHECK(field_3003().residue_degree(6007) == 1);
  CHECK(code_of([] { field_3003().residue_degree(7); }) == ErrorCode::kRamifiedPrime);
  for (std::int64_t q : rlwe::primes_between(2, 400)) {
    if (3003 % q == 0) continue;
    CHECK(30 % field_3003().residue_degree(q) == 0);
  }
}

TEST_CASE("galois permutations form a free action of G/H") {
  const auto& H = field_3003();
  const int n = H.degree();
  auto id = H.galois_permutation(1);
  for (int i = 0; i < n; ++i) CHECK(id[i] == i);
  for (std::int64_t c1 : H.cosets()) {
    auto p1 = H.galois_permutation(c1);
    std::vector<int> sorted = p1;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> iota(n);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    if (c1 != H.coset_of(1)) {
      for (int i = 0; i < n; ++i) CHECK(p1[i] != i);
    }
    for (std::int64_t c2 : H.cosets()) {
      auto p2 = H.galois_permutation(c2);
      auto p12 = H.galois_permutation(H.coset_of(c1 * c2 % 3003));
      for (int i = 0; i < n; ++i) CHECK(p2[p1[i]] == p12[i]);
    }
  }
}

TEST_CASE("extension degree") {
  const auto& H = field_3003();
  const int n = H.degree();
  std::vector<std::int64_t> ones(n, 1);
  CHECK(H.extension_degree(ones) == 1);

  std::vector<std::int64_t> indicator(n, 0);
  indicator[0] = 1;
  CHECK(H.extension_degree(indicator) == n);

  // {1, -1}: the stabilizer is complex conjugation alone.
  std::vector<std::int64_t> pair(n, 0);
  pair[H.coset_index(1)] = 1;
  pair[H.coset_index(3002)] = 1;
  CHECK(H.extension_degree(pair) == n / 2);

  std::vector<std::int64_t> zero(n, 0);
  CHECK(code_of([&] { H.extension_degree(zero); }) == ErrorCode::kZeroElement);

  // Vectors constant on the orbits of a cyclic subgroup <c>.
  for (std::int64_t c : H.cosets()) {
    std::vector<std::int64_t> v(n, 0);
    int label = 1;
    for (int i = 0; i < n; ++i) {
      if (v[i] != 0) continue;
      std::int64_t y = H.cosets()[i];
      do {
        v[H.coset_index(y)] = label;
        y = y * c % 3003;
      } while (H.coset_index(y) != i);
      ++label;
    }
    // Distinct labels per orbit: the stabilizer is exactly <c>.
    int order = 1;
    for (std::int64_t y = c; !H.contains(y); y = y * c % 3003) ++order;
    CHECK(H.extension_degree(v) == n / order);
  }
}

TEST_CASE("degree_f_primes") {
  auto primes = field_2805().degree_f_primes(60, 70, 2);
  CHECK(std::find(primes.begin(), primes.end(), 67) != primes.end());
  CHECK(field_2805().degree_f_primes(70, 70, 2).empty());
  CHECK(field_2805().degree_f_primes(70, 71, 2).empty());

  const auto& H = field_3003();
  auto split = H.degree_f_primes(2, 50000, 1);
  std::vector<std::int64_t> direct;
  for (std::int64_t q : rlwe::primes_between(2, 50000)) {
    if (3003 % q != 0 && H.contains(q % 3003)) direct.push_back(q);
  }
  CHECK(split == direct);
  CHECK(!split.empty());
}
