#pragma once

// Chi-square machinery: incomplete gamma, central and noncentral chi-square
// distributions, binned uniformity tests and the success bound of the
// chi-square attack.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rlwe {

class IndexedField;

double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double chi_square_statistic(std::span<const std::int64_t> observed, std::span<const double> expected);

double chi_square_cdf(double x, double dof);
double chi_square_sf(double x, double dof);
/// x with chi_square_cdf(x, dof) = alpha.  The upper tail is solved directly
/// for alpha > 1/2 so thresholds near 1 keep their relative accuracy.
double chi_square_inv_cdf(double alpha, double dof);

double noncentral_chi_square_cdf(double x, double dof, double lambda);
double noncentral_chi_square_sf(double x, double dof, double lambda);

/// alpha^{N-1} * Pr[chi'^2_d(4 M Delta^2) > F^{-1}_d(alpha)] with d = N - 1
/// unless the test uses fewer bins (dof > 0 overrides d).
double success_lower_bound(std::int64_t N, std::int64_t M, double delta, double alpha, int dof = 0);

struct AlphaChoice {
  double alpha = 0;
  double bound = 0;
};

/// The alpha in [1 - 10^-0.5, 1 - 10^-15] maximizing success_lower_bound.
AlphaChoice optimal_alpha(std::int64_t N, std::int64_t M, double delta, int dof = 0);

double statistical_distance(std::span<const double> P, std::span<const double> Q);
double l2_distance(std::span<const double> P, std::span<const double> Q);

/// Normalized histogram of values in [0, N).
std::vector<double> empirical_distribution(std::span<const std::uint32_t> values, std::uint32_t N);
/// Statistical distance between the empirical distribution and uniform on [0, N).
double distance_to_uniform(std::span<const std::uint32_t> values, std::uint32_t N);

enum class BinKind { kPerElement, kSubfieldTwoBin, kCircle, kCentered, kCoarse, kCustom };

std::string bin_kind_name(BinKind kind);

/// A partition of a finite set [0, N) (table-driven) or of the circle [0, p)
/// (k equal arcs), with the probability mass of each bin under the uniform
/// distribution.
struct BinSpec {
  BinKind kind = BinKind::kPerElement;
  int bin_count = 0;
  std::vector<double> masses;
  std::vector<std::uint32_t> bin_of;  // finite kinds except kPerElement
  double circle_length = 0;           // kCircle

  std::uint32_t domain_size() const;
  std::uint32_t bin(std::uint32_t value) const {
    return bin_of.empty() ? value : bin_of[value];
  }
  std::uint32_t circle_bin(double x) const;

  static BinSpec per_element(std::uint32_t N);
  /// Two bins over F_{q^f}: elements of full degree and the rest.
  static BinSpec subfield_two_bin(const IndexedField& field);
  static BinSpec circle(double length, int k);
  /// F_p through centred representatives in (-p/2, p/2], one bin each.
  static BinSpec centered(std::uint32_t p);
  /// F_p through centred representatives, grouped into ceil(p/20) intervals.
  static BinSpec coarse(std::uint32_t p);
  static BinSpec from_table(std::vector<std::uint32_t> bin_of, BinKind kind = BinKind::kCustom);
};

struct TestResult {
  double chi2 = 0;
  int dof = 0;
  double threshold = 0;
  bool rejected = false;
  double p_value = 1;
};

/// Throws InsufficientSamples unless every expected count M * mass is >= 5.
void check_sample_gate(const BinSpec& bins, std::size_t M);

TestResult uniformity_test_counts(std::span<const std::int64_t> counts, const BinSpec& bins, double alpha);
TestResult uniformity_test(std::span<const std::uint32_t> values, const BinSpec& bins, double alpha);
TestResult circle_uniformity_test(std::span<const double> values, const BinSpec& bins, double alpha);

/// Homogeneity of two histograms over the same bins; bins empty in both are
/// dropped.  p_value is the upper tail of chi-square with (used bins - 1) dof.
TestResult two_sample_chi_square(std::span<const std::int64_t> a, std::span<const std::int64_t> b, double alpha);

}  // namespace rlwe
