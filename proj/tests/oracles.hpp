#pragma once

// Reference implementations used only by the tests.  None of them shares code
// with the library beyond the public data types.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rlwe/cyclo_group.hpp"
#include "rlwe/real.hpp"

namespace oracle {

inline std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

inline int moebius(std::int64_t n) {
  int sign = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    sign = -sign;
  }
  if (n > 1) sign = -sign;
  return sign;
}

inline std::vector<std::int64_t> units(std::int64_t m) {
  std::vector<std::int64_t> out;
  for (std::int64_t a = 1; a < m; ++a) {
    if (gcd(a, m) == 1) out.push_back(a);
  }
  return out;
}

/// Multiplicative closure of gens mod m by breadth-first search.
inline std::set<std::int64_t> closure(std::int64_t m, const std::vector<std::int64_t>& gens) {
  std::set<std::int64_t> seen{1};
  std::vector<std::int64_t> frontier{1};
  while (!frontier.empty()) {
    std::vector<std::int64_t> next;
    for (std::int64_t x : frontier) {
      for (std::int64_t g : gens) {
        std::int64_t y = ((x * g) % m + m) % m;
        if (seen.insert(y).second) next.push_back(y);
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

/// zeta_m^x written on primitive m-th roots: with d = gcd(x, m) and m1 = m/d,
/// zeta^x = mu(d) * sum_{v in (Z/d)^*} zeta^{x + m1 v}.
inline void expand_root(std::int64_t m, std::int64_t x, std::map<std::int64_t, std::int64_t>& acc,
                        std::int64_t weight) {
  x = ((x % m) + m) % m;
  std::int64_t d = gcd(x == 0 ? m : x, m);
  std::int64_t m1 = m / d;
  int mu = moebius(d);
  if (mu == 0) return;
  for (std::int64_t v = 0; v < d; ++v) {
    if (d > 1 && gcd(v, d) != 1) continue;
    acc[((x + m1 * v) % m + m) % m] += weight * mu;
  }
}

/// Exact product of two elements of O_K on the basis w_c = sum_h zeta^{hc},
/// by expanding every w_a w_b into primitive roots of unity.
class StructureConstants {
 public:
  explicit StructureConstants(const rlwe::SubgroupDescriptor& H) : H_(H) {
    const int n = H.degree();
    const std::int64_t m = H.modulus();
    const auto& cosets = H.cosets();
    const auto& elems = H.elements();
    table_.assign(static_cast<std::size_t>(n) * n, std::vector<std::int64_t>(n, 0));
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        std::map<std::int64_t, std::int64_t> acc;
        for (std::int64_t h1 : elems) {
          for (std::int64_t h2 : elems) {
            expand_root(m, h1 * cosets[a] % m + h2 * cosets[b] % m, acc, 1);
          }
        }
        std::vector<std::int64_t> coeff(n, 0);
        for (auto [u, c] : acc) {
          if (c == 0) continue;
          int idx = position(u);
          coeff[idx] += c;
        }
        // An H-invariant element has equal coefficients on each coset.
        for (int i = 0; i < n; ++i) coeff[i] /= static_cast<std::int64_t>(elems.size());
        table_[a * n + b] = coeff;
        table_[b * n + a] = coeff;
      }
    }
  }

  std::vector<std::int64_t> multiply(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) const {
    const int n = H_.degree();
    std::vector<std::int64_t> out(n, 0);
    for (int a = 0; a < n; ++a) {
      if (x[a] == 0) continue;
      for (int b = 0; b < n; ++b) {
        if (y[b] == 0) continue;
        const auto& t = table_[a * n + b];
        for (int k = 0; k < n; ++k) out[k] += x[a] * y[b] * t[k];
      }
    }
    return out;
  }

 private:
  int position(std::int64_t u) const {
    for (int i = 0; i < H_.degree(); ++i) {
      for (std::int64_t h : H_.elements()) {
        if (h * H_.cosets()[i] % H_.modulus() == u) return i;
      }
    }
    return -1;
  }

  rlwe::SubgroupDescriptor H_;
  std::vector<std::vector<std::int64_t>> table_;
};

/// Chi-square CDF by numerical integration of the density.
inline double chi_square_cdf_quadrature(double x, double k) {
  if (x <= 0) return 0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double log_norm = -(k / 2) * std::log(2.0) - std::lgamma(k / 2);
  auto density = [&](double t) {
    if (t <= 0) return 0.0;
    return std::exp(log_norm + (k / 2 - 1) * std::log(t) - t / 2);
  };
  return integrator.integrate(density, 0.0, x);
}

/// D_{Z^2, sigma} normalized over the box |z_i| <= box, indexed
/// (z0 + box) * (2 box + 1) + (z1 + box).
inline std::vector<double> discrete_gaussian_z2(double sigma, int box) {
  const int w = 2 * box + 1;
  std::vector<double> p(static_cast<std::size_t>(w) * w);
  double total = 0;
  for (int i = -box; i <= box; ++i) {
    for (int j = -box; j <= box; ++j) {
      double v = std::exp(-(i * i + j * j) / (2 * sigma * sigma));
      p[(i + box) * w + (j + box)] = v;
      total += v;
    }
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace oracle
