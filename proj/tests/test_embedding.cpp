#include <doctest.h>

#include <cmath>

#include "rlwe/embedding.hpp"
#include "rlwe/lattice.hpp"

using rlwe::Real;
using rlwe::SubgroupDescriptor;

namespace {

template <typename Scalar>
rlwe::EmbeddingData<Scalar> embed_at(const SubgroupDescriptor& H, int bits) {
  return rlwe::embedding_matrix<Scalar>(H, bits);
}

}  // namespace

TEST_CASE("Q(zeta_3): every column has norm sqrt(2) and |d_K| = 3") {
  auto H = SubgroupDescriptor::create(3, {1});
  auto E = embed_at<double>(H, 53);
  CHECK(E.r1 == 0);
  CHECK(E.r2 == 1);
  for (int j = 0; j < 2; ++j) CHECK(E.aw.col(j).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  auto D = rlwe::discriminant_abs(E);
  REQUIRE(D.nearest_integer.has_value());
  CHECK(*D.nearest_integer == 3);
}

TEST_CASE("Q(zeta_p): |det A_w|^2 = p^(p-2)") {
  rlwe::PrecisionScope scope(100);
  for (std::int64_t p : {5, 7, 11, 13}) {
    auto H = SubgroupDescriptor::create(p, {1});
    auto E = embed_at<Real>(H, 100);
    auto D = rlwe::discriminant_abs(E);
    Real expect = boost::multiprecision::pow(Real(p), static_cast<int>(p - 2));
    CHECK(rlwe::to_double(Real(abs(D.value - expect) / expect)) < 1e-20);
    REQUIRE(D.nearest_integer.has_value());
    CHECK(*D.nearest_integer == boost::multiprecision::pow(boost::multiprecision::cpp_int(p), static_cast<unsigned>(p - 2)));
  }
}

TEST_CASE("T is unitary and A_w real to half the working precision") {
  rlwe::PrecisionScope scope(100);
  auto H = SubgroupDescriptor::create(2805, {1684, 1618});
  auto E = embed_at<Real>(H, 100);
  CHECK(E.unitarity_residual <= std::ldexp(1.0, -50));
  CHECK(E.realness_residual <= std::ldexp(1.0, -50));
  // Galois acts on a normal basis by permutation: equal column norms.
  double first = rlwe::to_double(Real(E.aw.col(0).norm()));
  for (int j = 1; j < H.degree(); ++j) {
    CHECK(rlwe::to_double(Real(E.aw.col(j).norm())) == doctest::Approx(first).epsilon(1e-20));
  }
}

TEST_CASE("precision below a double mantissa is rejected") {
  auto H = SubgroupDescriptor::create(5, {1});
  CHECK_THROWS_AS(embed_at<double>(H, 40), rlwe::Error);
}

TEST_CASE("discriminant of the n = 40 field agrees at 100 and 200 bits") {
  auto H = SubgroupDescriptor::create(2805, {1684, 1618});
  double log100, log200;
  {
    rlwe::PrecisionScope scope(100);
    log100 = rlwe::to_double(rlwe::discriminant_abs(embed_at<Real>(H, 100)).log_value);
  }
  {
    rlwe::PrecisionScope scope(200);
    log200 = rlwe::to_double(rlwe::discriminant_abs(embed_at<Real>(H, 200)).log_value);
  }
  CHECK(log100 > 0);
  // Relative 1e-6 on |d_K| is an absolute 1e-6 on its logarithm.
  CHECK(std::abs(log100 - log200) < 1e-6);
}

TEST_CASE("3003 field: |det A_w| equals the product of Gram-Schmidt norms") {
  rlwe::PrecisionScope scope(100);
  auto H = SubgroupDescriptor::create(3003, {2276, 2729, 1123});
  auto E = embed_at<Real>(H, 100);
  Real log_det = rlwe::log_abs_det(E.aw);
  auto gs = rlwe::gram_schmidt<Real>(E.aw, 100);
  Real log_prod = 0;
  for (Eigen::Index i = 0; i < gs.norms.size(); ++i) log_prod += log(gs.norms(i));
  CHECK(std::abs(rlwe::to_double(Real(log_det - log_prod))) < 1e-6);
}

TEST_CASE("Gram matrix is invariant under every Galois permutation") {
  rlwe::PrecisionScope scope(100);
  for (auto [m, gens] : std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>>{
           {2805, {1684, 1618}}, {3003, {2276, 2729, 1123}}, {285, {16, 41}}, {15, {14}}}) {
    auto H = SubgroupDescriptor::create(m, gens);
    auto E = embed_at<Real>(H, 100);
    rlwe::Matrix<Real> G = rlwe::gram_matrix(E);
    Real scale = G.cwiseAbs().maxCoeff();
    double worst = 0;
    for (std::int64_t c : H.cosets()) {
      auto perm = H.galois_permutation(c);
      for (int i = 0; i < H.degree(); ++i) {
        for (int j = 0; j < H.degree(); ++j) {
          worst = std::max(worst, rlwe::to_double(Real(abs(G(perm[i], perm[j]) - G(i, j)) / scale)));
        }
      }
    }
    CHECK(worst <= std::ldexp(1.0, -50));
  }
}

TEST_CASE("sigma from sigma0") {
  CHECK(rlwe::sigma_from_sigma0(1.0, 1.0, 7) == 1.0);
  double expect = 0.5 * std::pow(251.0, 249.0 / 500.0);
  double log_disc = 249.0 * std::log(251.0);
  CHECK(rlwe::sigma_from_log_disc(0.5, log_disc, 250) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(rlwe::sigma_from_sigma0(2.0, 125.0, 4) == doctest::Approx(2 * rlwe::sigma_from_sigma0(1.0, 125.0, 4)));
  CHECK(rlwe::sigma_from_sigma0(1.0, 125.0, 4) == doctest::Approx(std::pow(125.0, 1.0 / 8)));
}
