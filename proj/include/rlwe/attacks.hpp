#pragma once

// Attack drivers: the chi-square attack on s mod q (one prime), the Galois
// search-to-decision recovery of s, the ramified-prime and dual attacks on
// Q(zeta_p), the modulus-switching experiment and the vulnerability scan.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rlwe/residue.hpp"
#include "rlwe/rlwe.hpp"
#include "rlwe/stats.hpp"

namespace rlwe {

enum class Verdict { kGuess, kNotRlwe, kInsufficientSamples, kUniform, kNonUniform };

std::string verdict_name(Verdict v);

struct AttackReport {
  Verdict verdict = Verdict::kNotRlwe;
  std::optional<std::uint32_t> guess;       // subfield index, or residue mod p
  std::vector<std::uint32_t> rejected;      // guesses whose test rejected
  std::vector<double> chi2_by_guess;        // empty unless requested
  double chi2_max = 0;
  std::uint32_t argmax = 0;
  double threshold = 0;
  int dof = 0;
  double alpha = 0;
  std::size_t samples = 0;
  std::size_t guesses_tested = 0;
  std::optional<double> delta_hat;
  std::optional<double> bound;
  std::vector<std::pair<std::string, double>> timings;  // seconds per phase
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  std::uint64_t seed = 0;
};

nlohmann::json report_to_json(const AttackReport& r);

/// Sample pair reduced modulo a prime: a and b as residue-field indices.
struct ReducedPair {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

std::vector<ReducedPair> reduce_samples(const ResidueContext& ctx, const std::vector<RlweSample>& samples,
                                        std::int64_t twist = 1, int threads = 0);
std::vector<std::uint32_t> reduce_errors(const ResidueContext& ctx, const std::vector<IntVector>& errors,
                                         std::int64_t twist = 1, int threads = 0);

/// 1 - 1/(10 N).
double default_alpha(std::uint64_t N);

struct GuessLoopOptions {
  int threads = 0;
  bool keep_chi2 = false;
  /// Stop after the first block of guesses containing a rejection.  Blocks
  /// have a fixed size so the outcome does not depend on the thread count.
  bool early_exit = false;
};

/// Guess loop over all q^f candidates for s mod q.
AttackReport chi_square_attack(const ResidueContext& ctx, const std::vector<ReducedPair>& samples, double alpha,
                               const BinSpec& bins, const GuessLoopOptions& opt = {});

enum class SearchStatus { kRecovered, kPartialFailure, kSingularSystem };

std::string search_status_name(SearchStatus s);

struct SearchResult {
  SearchStatus status = SearchStatus::kPartialFailure;
  std::optional<IntVector> secret;
  std::vector<std::int64_t> twists;
  std::vector<std::int64_t> failed_twists;
  std::vector<AttackReport> reports;
  double seconds = 0;
};

/// One coset representative per prime above q: the cosets of <q> H in
/// (Z/mZ)^*, each represented by its first member in coset order.
std::vector<std::int64_t> prime_twists(const SubgroupDescriptor& H, std::int64_t q);

/// Solves A x = b over F_q (A square).  nullopt if A is singular.
std::optional<std::vector<std::uint32_t>> solve_mod_q(std::vector<std::vector<std::uint32_t>> A,
                                                      std::vector<std::uint32_t> b, std::uint32_t q);

SearchResult search_attack(const RlweInstance& inst, const ResidueContext& ctx, const std::vector<RlweSample>& samples,
                           double alpha, BinKind bins, const GuessLoopOptions& opt = {});

struct RamifiedOptions {
  double alpha = 0;  // 0 selects 1 - 1/(100 p)
  BinKind primary = BinKind::kCentered;
  int threads = 0;
};

AttackReport ramified_decision_attack(std::int64_t p, const std::vector<RlweSample>& samples,
                                      const RamifiedOptions& opt = {});

inline constexpr double kDualDefaultAlpha = 0.99;

AttackReport dual_decision_attack(std::int64_t p, const std::vector<double>& observations, int nbins = 50,
                                  double alpha = kDualDefaultAlpha);

struct ModSwitchOptions {
  double tau = 0;     // 0 selects the instance's sigma
  double alpha = 0;   // 0 selects 1 - 1/(100 N)
  BinKind bins = BinKind::kPerElement;
  std::int64_t twist = 1;
  bool direct_attack = true;
  std::size_t congruence_checks = 100;
  int threads = 0;
  std::uint64_t seed = 0;
};

struct ModSwitchResult {
  AttackReport switched;                 // attack on pi_{q,p}(samples)
  std::optional<AttackReport> direct;    // attack on fresh samples at p
  TestResult a_err_uniformity;           // a'' mod P over F_{p^f}
  std::size_t congruence_checked = 0;
  std::size_t congruence_held = 0;
  double a_b_err_correlation = 0;        // Pearson r over all a'', b'' coordinates
  std::uint32_t true_residue = 0;        // s mod P at p
  double seconds = 0;
};

ModSwitchResult modulus_switch_experiment(const RlweInstance& inst, std::int64_t p, std::size_t M,
                                          const ModSwitchOptions& opt = {});

nlohmann::json modswitch_to_json(const ModSwitchResult& r);

struct ScanCandidate {
  std::int64_t m = 0;
  std::vector<std::int64_t> gens;
};

struct ScanOptions {
  std::int64_t q_lo = 2;
  std::int64_t q_hi = 100;
  int f_target = 2;
  double sigma0 = 1.0;
  double alpha = 0;  // 0: 1 - 1/(10 N) for attacks, tuned to Delta-hat for estimates
  BinKind bins = BinKind::kPerElement;
  std::size_t delta_samples = 100000;
  std::size_t max_samples = 50000;
  bool estimate_only = false;
  double attack_threshold = 0.5;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct ScanRow {
  std::int64_t m = 0;
  std::vector<std::int64_t> gens;
  int n = 0;
  std::int64_t q = 0;
  int f = 0;
  double sigma0 = 0;
  std::size_t M = 0;
  std::string status;  // attacked | estimated | failed | safe | error
  double delta_hat = 0;
  double bound = 0;
  double alpha = 0;
  double seconds = 0;            // measured wall time of the attack
  double estimated_seconds = 0;  // per-test time times the number of guesses
  std::string message;
};

std::vector<ScanRow> vulnerability_search(const std::vector<ScanCandidate>& candidates, const ScanOptions& opt);

std::string scan_csv_header();
std::string scan_row_csv(const ScanRow& row);

BinSpec make_bins(BinKind kind, const ResidueContext& ctx);

}  // namespace rlwe
