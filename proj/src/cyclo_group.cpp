#include "rlwe/cyclo_group.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rlwe/errors.hpp"

namespace rlwe {

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t mod_pow(std::int64_t base, std::uint64_t exp, std::int64_t mod) {
  unsigned __int128 result = 1 % mod;
  unsigned __int128 b = static_cast<unsigned __int128>(((base % mod) + mod) % mod);
  while (exp > 0) {
    if (exp & 1U) result = result * b % static_cast<unsigned __int128>(mod);
    b = b * b % static_cast<unsigned __int128>(mod);
    exp >>= 1U;
  }
  return static_cast<std::int64_t>(result);
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t mod) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = mod, new_r = ((a % mod) + mod) % mod;
  while (new_r != 0) {
    std::int64_t quotient = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - quotient * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - quotient * new_r);
  }
  if (r != 1) throw Error(ErrorCode::kNonUnit, std::to_string(a) + " mod " + std::to_string(mod));
  return t < 0 ? t + mod : t;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d : {2, 3, 5, 7}) {
    if (n % d == 0) return n == d;
  }
  for (std::int64_t d = 11; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

bool is_squarefree(std::int64_t n) {
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % (d * d) == 0) return false;
  }
  return n >= 1;
}

std::int64_t euler_phi(std::int64_t n) {
  std::int64_t result = n;
  for (std::int64_t p : prime_factors(n)) result = result / p * (p - 1);
  return result;
}

int moebius(std::int64_t n) {
  if (!is_squarefree(n)) return 0;
  return prime_factors(n).size() % 2 == 0 ? 1 : -1;
}

std::vector<std::int64_t> primes_between(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  if (hi <= lo + 1) return out;
  std::int64_t start = std::max<std::int64_t>(lo + 1, 2);
  std::vector<char> composite(static_cast<std::size_t>(hi), 0);
  for (std::int64_t i = 2; i * i < hi; ++i) {
    if (composite[i]) continue;
    for (std::int64_t j = i * i; j < hi; j += i) composite[j] = 1;
  }
  for (std::int64_t i = start; i < hi; ++i) {
    if (!composite[i]) out.push_back(i);
  }
  return out;
}

std::int64_t SubgroupDescriptor::reduce(std::int64_t a) const { return ((a % m_) + m_) % m_; }

SubgroupDescriptor SubgroupDescriptor::create(std::int64_t m, std::vector<std::int64_t> generators) {
  if (m < 3 || m % 2 == 0 || !is_squarefree(m)) {
    throw Error(ErrorCode::kBadModulus, "m must be odd, squarefree and >= 3, got " + std::to_string(m));
  }
  SubgroupDescriptor H;
  H.m_ = m;
  for (std::int64_t g : generators) {
    std::int64_t r = ((g % m) + m) % m;
    if (std::gcd(r, m) != 1) {
      throw Error(ErrorCode::kNonUnitGenerator,
                  std::to_string(g) + " is not a unit mod " + std::to_string(m));
    }
    H.gens_.push_back(r);
  }

  // Closure by repeated multiplication with the generators.
  H.in_h_.assign(static_cast<std::size_t>(m), 0);
  std::vector<std::int64_t> frontier{1};
  H.in_h_[1] = 1;
  H.elements_.push_back(1);
  while (!frontier.empty()) {
    std::vector<std::int64_t> next;
    for (std::int64_t x : frontier) {
      for (std::int64_t g : H.gens_) {
        std::int64_t y = x * g % m;
        if (!H.in_h_[y]) {
          H.in_h_[y] = 1;
          H.elements_.push_back(y);
          next.push_back(y);
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(H.elements_.begin(), H.elements_.end());
  H.totally_real_ = H.in_h_[m - 1] != 0;

  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  std::vector<std::int64_t> reps;
  for (std::int64_t a = 1; a < m; ++a) {
    if (seen[a] || std::gcd(a, m) != 1) continue;
    reps.push_back(a);
    for (std::int64_t h : H.elements_) seen[a * h % m] = 1;
  }

  if (!H.totally_real_) {
    std::vector<std::int64_t> kept;
    std::fill(seen.begin(), seen.end(), 0);
    for (std::int64_t c : reps) {
      if (seen[c]) continue;
      kept.push_back(c);
      for (std::int64_t h : H.elements_) {
        seen[c * h % m] = 1;
        seen[(m - c) * h % m] = 1;
      }
    }
    reps = kept;
    for (std::int64_t c : kept) reps.push_back(m - c);
  }
  H.cosets_ = std::move(reps);

  H.coset_index_.assign(static_cast<std::size_t>(m), -1);
  for (std::size_t i = 0; i < H.cosets_.size(); ++i) {
    for (std::int64_t h : H.elements_) H.coset_index_[H.cosets_[i] * h % m] = static_cast<int>(i);
  }
  return H;
}

bool SubgroupDescriptor::contains(std::int64_t a) const { return in_h_[reduce(a)] != 0; }

bool SubgroupDescriptor::is_unit(std::int64_t a) const { return coset_index_[reduce(a)] >= 0; }

int SubgroupDescriptor::coset_index(std::int64_t a) const {
  int idx = coset_index_[reduce(a)];
  if (idx < 0) {
    throw Error(ErrorCode::kNonUnit, std::to_string(a) + " is not a unit mod " + std::to_string(m_));
  }
  return idx;
}

std::int64_t SubgroupDescriptor::coset_of(std::int64_t a) const { return cosets_[coset_index(a)]; }

int SubgroupDescriptor::residue_degree(std::int64_t q) const {
  if (!is_prime(q)) throw Error(ErrorCode::kNotPrime, std::to_string(q));
  if (m_ % q == 0) {
    throw Error(ErrorCode::kRamifiedPrime, std::to_string(q) + " divides " + std::to_string(m_));
  }
  std::int64_t x = q % m_;
  for (int f = 1; f <= degree(); ++f) {
    if (in_h_[x]) return f;
    x = x * (q % m_) % m_;
  }
  throw Error(ErrorCode::kInvalidArgument, "residue degree exceeds field degree");
}

std::vector<int> SubgroupDescriptor::galois_permutation(std::int64_t c) const {
  std::vector<int> perm(cosets_.size());
  for (std::size_t i = 0; i < cosets_.size(); ++i) perm[i] = coset_index(cosets_[i] * reduce(c) % m_);
  return perm;
}

int SubgroupDescriptor::extension_degree(std::span<const std::int64_t> coeffs) const {
  if (coeffs.size() != cosets_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "coefficient vector length differs from degree");
  }
  if (std::all_of(coeffs.begin(), coeffs.end(), [](std::int64_t v) { return v == 0; })) {
    throw Error(ErrorCode::kZeroElement, "degree of 0 is undefined");
  }
  int fixing = 0;
  for (std::int64_t l : cosets_) {
    bool fixed = true;
    for (std::size_t i = 0; i < cosets_.size() && fixed; ++i) {
      fixed = coeffs[coset_index(l * cosets_[i] % m_)] == coeffs[i];
    }
    fixing += fixed ? 1 : 0;
  }
  return degree() / fixing;
}

std::vector<std::int64_t> SubgroupDescriptor::degree_f_primes(std::int64_t lo, std::int64_t hi,
                                                              int f) const {
  std::vector<std::int64_t> out;
  for (std::int64_t q : primes_between(lo, hi)) {
    if (m_ % q == 0) continue;
    if (residue_degree(q) == f) out.push_back(q);
  }
  return out;
}

}  // namespace rlwe
