#include "rlwe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "rlwe/errors.hpp"
#include "rlwe/finite_field.hpp"

namespace rlwe {

namespace {

constexpr int kMaxIterations = 200000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Series for P(a, x), good for x < a + 1.
double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw Error(ErrorCode::kConvergenceFailure, "incomplete gamma series did not converge");
}

// Lentz continued fraction for Q(a, x), good for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw Error(ErrorCode::kConvergenceFailure, "incomplete gamma continued fraction did not converge");
}

void check_dof(double dof) {
  if (!(dof > 0)) throw Error(ErrorCode::kInvalidArgument, "degrees of freedom must be positive");
}

// Poisson(lambda/2) mixture of central chi-square tails, summed outward from
// the mode.  For large lambda the lgamma rounding keeps the visited weight a
// few ulps of log-weight away from 1, so the sum stops once both frontier terms
// are negligible and is normalised by the weight actually visited.
template <typename Tail>
double poisson_mixture(double dof, double lambda, Tail tail) {
  const double mu = lambda / 2;
  const auto mode = static_cast<std::int64_t>(std::floor(mu));
  auto log_weight = [&](std::int64_t k) {
    return -mu + static_cast<double>(k) * std::log(mu) - std::lgamma(static_cast<double>(k) + 1);
  };
  double total_weight = 0;
  double sum = 0;
  std::int64_t up = mode;
  std::int64_t down = mode - 1;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    double w_up = std::exp(log_weight(up)), w_down = 0;
    total_weight += w_up;
    sum += w_up * tail(dof + 2.0 * static_cast<double>(up));
    ++up;
    if (down >= 0) {
      w_down = std::exp(log_weight(down));
      total_weight += w_down;
      sum += w_down * tail(dof + 2.0 * static_cast<double>(down));
      --down;
    }
    const bool left_done = down < 0 || w_down < 1e-17 * total_weight;
    const bool right_done = static_cast<double>(up) > mu && w_up < 1e-17 * total_weight;
    if (left_done && right_done) return std::min(1.0, sum / total_weight);
  }
  throw Error(ErrorCode::kConvergenceFailure, "noncentral chi-square series did not converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0) || x < 0) throw Error(ErrorCode::kInvalidArgument, "incomplete gamma needs a > 0 and x >= 0");
  if (x == 0) return 0;
  if (std::isinf(x)) return 1;
  if (x < a + 1) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0) || x < 0) throw Error(ErrorCode::kInvalidArgument, "incomplete gamma needs a > 0 and x >= 0");
  if (x == 0) return 1;
  if (std::isinf(x)) return 0;
  if (x < a + 1) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi_square_statistic(std::span<const std::int64_t> observed, std::span<const double> expected) {
  if (observed.size() != expected.size()) throw Error(ErrorCode::kInvalidArgument, "bin count mismatch");
  double chi2 = 0;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    if (!(expected[j] > 0)) throw Error(ErrorCode::kEmptyBins, "expected count must be positive");
    double d = static_cast<double>(observed[j]) - expected[j];
    chi2 += d * d / expected[j];
  }
  return chi2;
}

double chi_square_cdf(double x, double dof) {
  check_dof(dof);
  if (x <= 0) return 0;
  return regularized_gamma_p(dof / 2, x / 2);
}

double chi_square_sf(double x, double dof) {
  check_dof(dof);
  if (x <= 0) return 1;
  return regularized_gamma_q(dof / 2, x / 2);
}

double chi_square_inv_cdf(double alpha, double dof) {
  check_dof(dof);
  if (!(alpha > 0 && alpha < 1)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  const bool upper = alpha > 0.5;
  const double target = upper ? 1.0 - alpha : alpha;
  auto f = [&](double x) { return upper ? chi_square_sf(x, dof) - target : chi_square_cdf(x, dof) - target; };
  double lo = 0;
  double hi = std::max(1.0, dof);
  int guard = 0;
  while ((upper ? f(hi) > 0 : f(hi) < 0)) {
    lo = hi;
    hi *= 2;
    if (++guard > 200) throw Error(ErrorCode::kConvergenceFailure, "could not bracket chi-square quantile");
  }
  if (lo == 0) {
    // cdf(0) = 0 exactly; move the lower end off the boundary only if needed.
    if (f(lo) == 0) return 0;
  }
  std::uintmax_t iters = 500;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(45), iters);
  if (iters >= 500) throw Error(ErrorCode::kConvergenceFailure, "chi-square quantile did not converge");
  return (r.first + r.second) / 2;
}

double noncentral_chi_square_cdf(double x, double dof, double lambda) {
  check_dof(dof);
  if (lambda < 0) throw Error(ErrorCode::kInvalidArgument, "noncentrality must be non-negative");
  if (x <= 0) return 0;
  if (lambda == 0) return chi_square_cdf(x, dof);
  return poisson_mixture(dof, lambda, [x](double d) { return chi_square_cdf(x, d); });
}

double noncentral_chi_square_sf(double x, double dof, double lambda) {
  check_dof(dof);
  if (lambda < 0) throw Error(ErrorCode::kInvalidArgument, "noncentrality must be non-negative");
  if (x <= 0) return 1;
  if (lambda == 0) return chi_square_sf(x, dof);
  return poisson_mixture(dof, lambda, [x](double d) { return chi_square_sf(x, d); });
}

double success_lower_bound(std::int64_t N, std::int64_t M, double delta, double alpha, int dof_override) {
  if (N < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two guesses");
  if (!(alpha > 0 && alpha < 1)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  if (delta < 0 || delta > 1) throw Error(ErrorCode::kInvalidArgument, "Delta must lie in [0, 1]");
  const double dof = dof_override > 0 ? dof_override : static_cast<double>(N - 1);
  const double threshold = chi_square_inv_cdf(alpha, dof);
  const double lambda = 4.0 * static_cast<double>(M) * delta * delta;
  return std::pow(alpha, static_cast<double>(N - 1)) * noncentral_chi_square_sf(threshold, dof, lambda);
}

AlphaChoice optimal_alpha(std::int64_t N, std::int64_t M, double delta, int dof) {
  // Search over t = -log10(1 - alpha); the bound is unimodal in t.
  auto negative_bound = [&](double t) {
    return -success_lower_bound(N, M, delta, 1.0 - std::pow(10.0, -t), dof);
  };
  auto best = boost::math::tools::brent_find_minima(negative_bound, 0.5, 15.0, 40);
  return {1.0 - std::pow(10.0, -best.first), -best.second};
}

namespace {

void check_distribution(std::span<const double> P) {
  double total = 0;
  for (double v : P) {
    if (v < 0) throw Error(ErrorCode::kNotADistribution, "negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::kNotADistribution, "probabilities do not sum to 1");
}

void check_pair(std::span<const double> P, std::span<const double> Q) {
  if (P.size() != Q.size() || P.empty()) throw Error(ErrorCode::kNotADistribution, "supports differ");
  check_distribution(P);
  check_distribution(Q);
}

double raw_statistical(std::span<const double> P, std::span<const double> Q) {
  double acc = 0;
  for (std::size_t i = 0; i < P.size(); ++i) acc += std::abs(P[i] - Q[i]);
  return acc / 2;
}

double raw_l2(std::span<const double> P, std::span<const double> Q) {
  double acc = 0;
  for (std::size_t i = 0; i < P.size(); ++i) acc += (P[i] - Q[i]) * (P[i] - Q[i]);
  return std::sqrt(acc);
}

void check_inequality(std::span<const double> P, std::span<const double> Q) {
  double d = raw_statistical(P, Q);
  double d2 = raw_l2(P, Q);
  if (d > std::sqrt(static_cast<double>(P.size())) / 2 * d2 * (1 + 1e-9) + 1e-15)
    throw Error(ErrorCode::kConvergenceFailure, "distance inequality violated");
}

}  // namespace

double statistical_distance(std::span<const double> P, std::span<const double> Q) {
  check_pair(P, Q);
  check_inequality(P, Q);
  return raw_statistical(P, Q);
}

double l2_distance(std::span<const double> P, std::span<const double> Q) {
  check_pair(P, Q);
  check_inequality(P, Q);
  return raw_l2(P, Q);
}

std::vector<double> empirical_distribution(std::span<const std::uint32_t> values, std::uint32_t N) {
  if (values.empty()) throw Error(ErrorCode::kNotADistribution, "no values");
  std::vector<double> hist(N, 0.0);
  for (std::uint32_t v : values) {
    if (v >= N) throw Error(ErrorCode::kInvalidArgument, "value outside the support");
    hist[v] += 1;
  }
  for (double& h : hist) h /= static_cast<double>(values.size());
  return hist;
}

double distance_to_uniform(std::span<const std::uint32_t> values, std::uint32_t N) {
  std::vector<double> P = empirical_distribution(values, N);
  std::vector<double> U(N, 1.0 / N);
  return statistical_distance(P, U);
}

std::string bin_kind_name(BinKind kind) {
  switch (kind) {
    case BinKind::kPerElement: return "per-element";
    case BinKind::kSubfieldTwoBin: return "subfield-two-bin";
    case BinKind::kCircle: return "circle";
    case BinKind::kCentered: return "centered";
    case BinKind::kCoarse: return "coarse";
    case BinKind::kCustom: return "custom";
  }
  return "unknown";
}

std::uint32_t BinSpec::domain_size() const {
  return bin_of.empty() ? static_cast<std::uint32_t>(bin_count) : static_cast<std::uint32_t>(bin_of.size());
}

std::uint32_t BinSpec::circle_bin(double x) const {
  auto j = static_cast<std::int64_t>(std::floor(x / circle_length * bin_count));
  return static_cast<std::uint32_t>(std::clamp<std::int64_t>(j, 0, bin_count - 1));
}

BinSpec BinSpec::per_element(std::uint32_t N) {
  if (N < 2) throw Error(ErrorCode::kEmptyBins, "need at least two bins");
  BinSpec b;
  b.kind = BinKind::kPerElement;
  b.bin_count = static_cast<int>(N);
  b.masses.assign(N, 1.0 / N);
  return b;
}

BinSpec BinSpec::from_table(std::vector<std::uint32_t> bin_of, BinKind kind) {
  BinSpec b;
  b.kind = kind;
  std::uint32_t k = 0;
  for (std::uint32_t v : bin_of) k = std::max(k, v + 1);
  b.bin_count = static_cast<int>(k);
  std::vector<double> counts(k, 0.0);
  for (std::uint32_t v : bin_of) counts[v] += 1;
  for (double c : counts)
    if (c == 0) throw Error(ErrorCode::kEmptyBins, "bin table leaves a bin empty");
  if (k < 2) throw Error(ErrorCode::kEmptyBins, "need at least two bins");
  b.masses.resize(k);
  for (std::uint32_t j = 0; j < k; ++j) b.masses[j] = counts[j] / static_cast<double>(bin_of.size());
  b.bin_of = std::move(bin_of);
  return b;
}

BinSpec BinSpec::subfield_two_bin(const IndexedField& field) {
  std::vector<std::uint32_t> table(field.size());
  for (std::uint32_t x = 0; x < field.size(); ++x) table[x] = field.is_full_degree(x) ? 0 : 1;
  return from_table(std::move(table), BinKind::kSubfieldTwoBin);
}

BinSpec BinSpec::circle(double length, int k) {
  if (k < 2) throw Error(ErrorCode::kEmptyBins, "need at least two bins");
  if (!(length > 0)) throw Error(ErrorCode::kInvalidArgument, "circle length must be positive");
  BinSpec b;
  b.kind = BinKind::kCircle;
  b.bin_count = k;
  b.masses.assign(k, 1.0 / k);
  b.circle_length = length;
  return b;
}

BinSpec BinSpec::centered(std::uint32_t p) {
  // One bin per residue; the centred labelling is a relabelling of equal bins.
  BinSpec b = per_element(p);
  b.kind = BinKind::kCentered;
  return b;
}

BinSpec BinSpec::coarse(std::uint32_t p) {
  const std::uint32_t k = (p + 19) / 20;
  std::vector<std::uint32_t> table(p);
  const std::int64_t half = (static_cast<std::int64_t>(p) - 1) / 2;
  for (std::uint32_t x = 0; x < p; ++x) {
    std::int64_t v = x <= half ? x : static_cast<std::int64_t>(x) - p;
    std::int64_t u = v + half;  // shift (-p/2, p/2] onto [0, p)
    table[x] = static_cast<std::uint32_t>(u * k / p);
  }
  return from_table(std::move(table), BinKind::kCoarse);
}

void check_sample_gate(const BinSpec& bins, std::size_t M) {
  for (double mass : bins.masses) {
    if (static_cast<double>(M) * mass < 5.0 - 1e-9) {
      throw Error(ErrorCode::kInsufficientSamples,
                  std::to_string(M) + " samples leave an expected bin count below 5 (" +
                      std::to_string(bins.bin_count) + " bins)");
    }
  }
}

TestResult uniformity_test_counts(std::span<const std::int64_t> counts, const BinSpec& bins, double alpha) {
  std::int64_t M = 0;
  for (auto c : counts) M += c;
  check_sample_gate(bins, static_cast<std::size_t>(M));
  std::vector<double> expected(bins.masses.size());
  for (std::size_t j = 0; j < expected.size(); ++j) expected[j] = static_cast<double>(M) * bins.masses[j];
  TestResult r;
  r.chi2 = chi_square_statistic(counts, expected);
  r.dof = bins.bin_count - 1;
  r.threshold = chi_square_inv_cdf(alpha, r.dof);
  r.rejected = r.chi2 > r.threshold;
  r.p_value = chi_square_sf(r.chi2, r.dof);
  return r;
}

TestResult uniformity_test(std::span<const std::uint32_t> values, const BinSpec& bins, double alpha) {
  if (bins.kind == BinKind::kCircle) throw Error(ErrorCode::kInvalidArgument, "circle bins need real values");
  std::vector<std::int64_t> counts(bins.bin_count, 0);
  const std::uint32_t N = bins.domain_size();
  for (std::uint32_t v : values) {
    if (v >= N) throw Error(ErrorCode::kInvalidArgument, "value outside the binned set");
    ++counts[bins.bin(v)];
  }
  return uniformity_test_counts(counts, bins, alpha);
}

TestResult circle_uniformity_test(std::span<const double> values, const BinSpec& bins, double alpha) {
  if (bins.kind != BinKind::kCircle) throw Error(ErrorCode::kInvalidArgument, "expected circle bins");
  std::vector<std::int64_t> counts(bins.bin_count, 0);
  for (double v : values) ++counts[bins.circle_bin(v)];
  return uniformity_test_counts(counts, bins, alpha);
}

TestResult two_sample_chi_square(std::span<const std::int64_t> a, std::span<const std::int64_t> b, double alpha) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "histograms differ in size");
  double na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  if (na == 0 || nb == 0) throw Error(ErrorCode::kEmptyBins, "empty histogram");
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  double chi2 = 0;
  int used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double total = static_cast<double>(a[i] + b[i]);
    if (total == 0) continue;
    double d = ka * static_cast<double>(a[i]) - kb * static_cast<double>(b[i]);
    chi2 += d * d / total;
    ++used;
  }
  if (used < 2) throw Error(ErrorCode::kEmptyBins, "need at least two occupied bins");
  TestResult r;
  r.chi2 = chi2;
  r.dof = used - 1;
  r.threshold = chi_square_inv_cdf(alpha, r.dof);
  r.rejected = chi2 > r.threshold;
  r.p_value = chi_square_sf(chi2, r.dof);
  return r;
}

}  // namespace rlwe
