#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rlwe/errors.hpp"
#include "rlwe/finite_field.hpp"
#include "rlwe/rng.hpp"
#include "rlwe/stats.hpp"

using rlwe::BinSpec;
using rlwe::ErrorCode;
using rlwe::Stream;

namespace {

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

TEST_CASE("chi-square statistic") {
  std::vector<std::int64_t> obs{10, 20, 30};
  std::vector<double> exp{10, 20, 30};
  CHECK(rlwe::chi_square_statistic(obs, exp) == 0.0);
  std::vector<std::int64_t> all_left{1000, 0};
  std::vector<double> half{500, 500};
  CHECK(rlwe::chi_square_statistic(all_left, half) == doctest::Approx(1000.0));
  std::vector<double> bad{500, 0};
  CHECK(code_of([&] { rlwe::chi_square_statistic(all_left, bad); }) == ErrorCode::kEmptyBins);
}

TEST_CASE("central chi-square against quadrature") {
  CHECK(rlwe::chi_square_cdf(0, 3) == 0.0);
  CHECK(rlwe::chi_square_cdf(1e6, 3) == doctest::Approx(1.0));
  for (double k : {1.0, 2.0, 5.0, 10.0, 49.0, 120.0}) {
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0, 50.0, 130.0}) {
      CHECK(rlwe::chi_square_cdf(x, k) == doctest::Approx(oracle::chi_square_cdf_quadrature(x, k)).epsilon(1e-8));
    }
  }
  // Find the 95% point of 1 dof from the quadrature oracle by bisection.
  double lo = 0, hi = 20;
  for (int i = 0; i < 100; ++i) {
    double mid = (lo + hi) / 2;
    (oracle::chi_square_cdf_quadrature(mid, 1) < 0.95 ? lo : hi) = mid;
  }
  CHECK(std::abs(rlwe::chi_square_inv_cdf(0.95, 1) - lo) < 1e-3);
  CHECK(std::abs(rlwe::chi_square_inv_cdf(0.95, 1) - 3.8415) < 1e-3);
}

TEST_CASE("inverse CDF round trip") {
  for (double a : {0.5, 0.9, 0.99, 0.999917}) {
    for (double d : {1.0, 10.0, 100.0}) {
      CHECK(std::abs(rlwe::chi_square_cdf(rlwe::chi_square_inv_cdf(a, d), d) - a) < 1e-9);
    }
  }
}

TEST_CASE("noncentral chi-square") {
  for (double x : {0.5, 5.0, 20.0}) {
    CHECK(rlwe::noncentral_chi_square_cdf(x, 10, 0) == doctest::Approx(rlwe::chi_square_cdf(x, 10)).epsilon(1e-12));
  }
  for (double x : {2.0, 10.0, 30.0}) {
    double prev = 1.0;
    for (double lambda = 0; lambda <= 60; lambda += 2) {
      double v = rlwe::noncentral_chi_square_cdf(x, 10, lambda);
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
  }
  // Monte Carlo: sum of 10 squared normals with total offset^2 = 5.
  const double lambda = 5, x = 15;
  const int draws = 10000000;
  const double mu = std::sqrt(lambda);
  Stream rng(42, 0);
  std::normal_distribution<double> normal;
  long below = 0;
  for (int t = 0; t < draws; ++t) {
    double z0 = normal(rng) + mu;
    double s = z0 * z0;
    for (int i = 1; i < 10; ++i) {
      double z = normal(rng);
      s += z * z;
    }
    below += s <= x ? 1 : 0;
  }
  double est = static_cast<double>(below) / draws;
  double se = std::sqrt(est * (1 - est) / draws);
  CHECK(std::abs(rlwe::noncentral_chi_square_cdf(x, 10, lambda) - est) < 3 * se);
}

TEST_CASE("noncentral chi-square with a large noncentrality") {
  // Mean dof + lambda, variance 2 (dof + 2 lambda); the law is close to normal.
  const double dof = 120, lambda = 12000;
  const double sd = std::sqrt(2 * (dof + 2 * lambda));
  CHECK(rlwe::noncentral_chi_square_cdf(dof + lambda, dof, lambda) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(rlwe::noncentral_chi_square_sf(dof + lambda - 6 * sd, dof, lambda) > 1 - 1e-6);
  CHECK(rlwe::noncentral_chi_square_sf(dof + lambda + 6 * sd, dof, lambda) < 1e-6);
  CHECK(rlwe::success_lower_bound(121, 50000, 0.248, 1 - 1.0 / 1210) ==
        doctest::Approx(std::pow(1 - 1.0 / 1210, 120)).epsilon(1e-9));
}

TEST_CASE("success lower bound") {
  const std::int64_t N = 121;
  const double alpha = 1 - 1.0 / (10 * N);
  CHECK(rlwe::success_lower_bound(N, 1000, 0, alpha) ==
        doctest::Approx(std::pow(alpha, N - 1) * (1 - alpha)).epsilon(1e-9));
  CHECK(std::pow(alpha, N - 1) >= std::exp(-0.1));
  double prev = 0;
  for (std::int64_t M = 100; M <= 3000; M += 100) {
    double b = rlwe::success_lower_bound(N, M, 0.2, alpha);
    CHECK(b >= prev - 1e-12);
    prev = b;
  }
  CHECK(prev <= std::pow(alpha, N - 1) + 1e-12);
}

TEST_CASE("statistical and l2 distances") {
  std::vector<double> U(8, 1.0 / 8), P(8, 0.0);
  P[3] = 1.0;
  CHECK(rlwe::statistical_distance(U, U) == 0.0);
  CHECK(rlwe::l2_distance(U, U) == 0.0);
  CHECK(rlwe::statistical_distance(P, U) == doctest::Approx(1 - 1.0 / 8));
  CHECK(rlwe::statistical_distance(P, U) <= std::sqrt(8.0) / 2 * rlwe::l2_distance(P, U) + 1e-12);
  std::vector<double> bad(8, 0.2);
  CHECK(code_of([&] { rlwe::statistical_distance(bad, U); }) == ErrorCode::kNotADistribution);
}

TEST_CASE("bin specs") {
  auto per = BinSpec::per_element(11);
  CHECK(per.bin_count == 11);

  rlwe::IndexedField F(rlwe::ExtensionField::create(13, 2));
  auto two = BinSpec::subfield_two_bin(F);
  CHECK(two.bin_count == 2);
  CHECK(two.masses[0] == doctest::Approx((169.0 - 13) / 169));
  CHECK(two.masses[1] == doctest::Approx(13.0 / 169));

  auto circle = BinSpec::circle(307, 50);
  CHECK(circle.bin_count == 50);
  CHECK(circle.circle_bin(0.0) == 0);
  CHECK(circle.circle_bin(306.99) == 49);

  auto coarse = BinSpec::coarse(251);
  CHECK(coarse.bin_count == 13);
  double total = 0;
  for (double m : coarse.masses) total += m;
  CHECK(total == doctest::Approx(1.0));
  auto centred = BinSpec::centered(251);
  CHECK(centred.bin_count == 251);
}

TEST_CASE("uniformity tests") {
  auto bins = BinSpec::per_element(97);
  std::vector<std::uint32_t> few(100, 0);
  CHECK(code_of([&] { rlwe::uniformity_test(few, bins, 0.99); }) == ErrorCode::kInsufficientSamples);

  Stream rng(3, 0);
  std::uniform_int_distribution<std::uint32_t> u(0, 96);
  std::vector<std::uint32_t> v(10000);
  for (auto& x : v) x = u(rng);
  auto r = rlwe::uniformity_test(v, bins, 0.99);
  CHECK(r.dof == 96);
  CHECK(r.rejected == (r.chi2 > r.threshold));
  CHECK(r.threshold == doctest::Approx(rlwe::chi_square_inv_cdf(0.99, 96)));

  // Relabelling equal-mass bins leaves the statistic unchanged.
  std::vector<std::uint32_t> relabel(97);
  for (std::uint32_t i = 0; i < 97; ++i) relabel[i] = (i * 5 + 3) % 97;
  std::vector<std::uint32_t> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = relabel[v[i]];
  CHECK(rlwe::uniformity_test(w, bins, 0.99).chi2 == doctest::Approx(r.chi2));

  // A concentrated sample is rejected.
  std::vector<std::uint32_t> lumpy(10000);
  for (std::size_t i = 0; i < lumpy.size(); ++i) lumpy[i] = i % 3 == 0 ? 0 : u(rng);
  CHECK(rlwe::uniformity_test(lumpy, bins, 0.99).rejected);
}

TEST_CASE("null calibration at alpha = 0.999") {
  // 10^3 trials of 10^4 draws into 97 bins: the statistic stays below the
  // 0.999 quantile in at least 99.5% of trials.
  auto bins = BinSpec::per_element(97);
  std::uniform_int_distribution<std::uint32_t> u(0, 96);
  int below = 0;
  for (int t = 0; t < 1000; ++t) {
    Stream rng(77, static_cast<std::uint64_t>(t));
    std::vector<std::int64_t> counts(97, 0);
    for (int i = 0; i < 10000; ++i) ++counts[u(rng)];
    below += rlwe::uniformity_test_counts(counts, bins, 0.999).rejected ? 0 : 1;
  }
  CHECK(below >= 995);
}

TEST_CASE("two-sample chi-square") {
  std::vector<std::int64_t> a{100, 200, 300, 0}, b{110, 190, 305, 0};
  auto r = rlwe::two_sample_chi_square(a, b, 0.99);
  CHECK(r.dof == 2);
  CHECK(r.p_value > 0.5);
  std::vector<std::int64_t> c{300, 200, 100, 0};
  CHECK(rlwe::two_sample_chi_square(a, c, 0.99).rejected);
}
