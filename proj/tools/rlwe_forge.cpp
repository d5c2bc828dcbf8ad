// rlwe-forge: instance generation, attacks and vulnerability scans.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rlwe/attacks.hpp"
#include "rlwe/errors.hpp"
#include "rlwe/io.hpp"
#include "rlwe/parallel.hpp"
#include "rlwe/rlwe.hpp"

using namespace rlwe;

namespace {

struct FieldArgs {
  std::int64_t m = 0;
  std::string gens;
  std::int64_t p = 0;
  std::int64_t q = 0;
  double sigma0 = 1.0;
  bool sigma_absolute = false;
  std::string secret = "uniform";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string instance;

  void add(CLI::App* app, bool with_instance = true) {
    app->add_option("--m", m, "cyclotomic conductor (odd, squarefree)");
    app->add_option("--gens", gens, "comma-separated generators of H");
    app->add_option("--p", p, "prime p for the field Q(zeta_p)");
    app->add_option("--q", q, "modulus (defaults to p for Q(zeta_p))");
    app->add_option("--sigma0", sigma0, "relative error width");
    app->add_flag("--sigma-absolute", sigma_absolute, "treat --sigma0 as the absolute sigma");
    app->add_option("--secret", secret, "uniform | gaussian")->check(CLI::IsMember({"uniform", "gaussian"}));
    app->add_option("--seed", seed, "RNG seed")->each([this](const std::string&) { seed_given = true; });
    if (with_instance) app->add_option("--instance", instance, "instance JSON file");
  }

  InstanceParams params() const {
    if (!instance.empty()) return read_instance(instance);
    InstanceParams p_out;
    if (p > 0) {
      p_out = InstanceParams::prime_cyclotomic_field(p, q > 0 ? q : p, sigma0, seed);
    } else {
      if (m <= 0) throw Error(ErrorCode::kInvalidArgument, "give --m/--gens, --p or --instance");
      p_out.m = m;
      p_out.gens = parse_list(gens);
      p_out.q = q;
      p_out.sigma0 = sigma0;
      p_out.seed = seed;
    }
    if (p_out.q <= 0) throw Error(ErrorCode::kInvalidArgument, "--q is required");
    p_out.sigma_mode = sigma_absolute ? SigmaMode::kAbsolute : SigmaMode::kGeometricMean;
    p_out.secret_mode = secret == "gaussian" ? SecretMode::kGaussian : SecretMode::kUniform;
    return p_out;
  }

  static std::vector<std::int64_t> parse_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(std::stoll(tok));
    }
    if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "--gens is empty");
    return out;
  }
};

void emit(const nlohmann::json& j, const std::string& out) {
  std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

BinKind parse_bins(const std::string& s) {
  if (s == "per-element") return BinKind::kPerElement;
  if (s == "two-bin" || s == "subfield-two-bin") return BinKind::kSubfieldTwoBin;
  if (s == "centered") return BinKind::kCentered;
  if (s == "coarse") return BinKind::kCoarse;
  throw Error(ErrorCode::kInvalidArgument, "unknown binning '" + s + "'");
}

std::vector<RlweSample> load_or_generate(const RlweInstance& inst, const InstanceParams& params,
                                         const std::string& samples_path, std::size_t count, bool uniform,
                                         int threads) {
  if (!samples_path.empty()) return read_samples(samples_path, nullptr, instance_hash(params));
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "give --samples or --count");
  GenerationOptions opt{params.seed, threads, 0};
  if (uniform) return generate_uniform_samples(inst.degree(), inst.modulus(), count, opt);
  return generate_samples(inst, count, opt);
}

std::uint32_t true_residue(const RlweInstance& inst, const ResidueContext& ctx, std::int64_t twist) {
  const IntVector& s = inst.secret();
  return ctx.reduce_to_index(std::span<const std::int64_t>(s.data(), static_cast<std::size_t>(s.size())), twist);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rlwe-forge: RLWE instances over subfields of cyclotomic fields and statistical attacks"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: all cores)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance and samples");
  FieldArgs gen_field;
  gen_field.add(gen, false);
  std::size_t gen_count = 0;
  bool gen_uniform = false;
  double gen_r_sqrtp = 0;
  std::string gen_instance_out = "instance.json";
  std::string gen_samples_out = "samples.csv";
  gen->add_option("--count", gen_count, "number of samples")->required();
  gen->add_flag("--uniform", gen_uniform, "uniform control samples");
  gen->add_option("--r-sqrtp", gen_r_sqrtp, "dual observations with r*sqrt(p) = value (needs --p)");
  gen->add_option("--instance-out", gen_instance_out, "instance JSON path");
  gen->add_option("--samples-out", gen_samples_out, "sample CSV path");

  // attack
  auto* attack = app.add_subcommand("attack", "run an attack");
  attack->require_subcommand(1);
  std::string out_path;
  double alpha = 0;

  auto* decision = attack->add_subcommand("decision", "chi-square attack on s mod q for one prime");
  FieldArgs dec_field;
  dec_field.add(decision);
  std::string dec_samples, dec_bins = "per-element";
  std::size_t dec_count = 0;
  std::int64_t dec_twist = 1;
  bool dec_uniform = false, dec_early = false, dec_keep = false;
  decision->add_option("--samples", dec_samples, "sample CSV");
  decision->add_option("--count", dec_count, "generate this many samples instead of reading");
  decision->add_flag("--uniform", dec_uniform, "generate uniform control samples");
  decision->add_option("--twist", dec_twist, "coset representative selecting the prime");
  decision->add_option("--bins", dec_bins, "per-element | two-bin");
  decision->add_option("--alpha", alpha, "test level (default 1 - 1/(10N))");
  decision->add_flag("--early-exit", dec_early, "stop at the first block with a rejection");
  decision->add_flag("--chi2", dec_keep, "include chi2 for every guess");
  decision->add_option("--out", out_path, "report JSON path");

  auto* search = attack->add_subcommand("search", "recover the full secret over all primes above q");
  FieldArgs search_field;
  search_field.add(search);
  std::string search_samples, search_bins = "per-element";
  std::size_t search_count = 0;
  search->add_option("--samples", search_samples, "sample CSV");
  search->add_option("--count", search_count, "generate this many samples instead of reading");
  search->add_option("--bins", search_bins, "per-element | two-bin");
  search->add_option("--alpha", alpha, "test level (default 1 - 1/(100 N g))");
  search->add_option("--out", out_path, "report JSON path");

  auto* ramified = attack->add_subcommand("ramified", "ramified-prime attack on Q(zeta_p) with q = p");
  FieldArgs ram_field;
  ram_field.add(ramified);
  std::string ram_samples, ram_bins = "centered";
  std::size_t ram_count = 0;
  bool ram_uniform = false;
  ramified->add_option("--samples", ram_samples, "sample CSV");
  ramified->add_option("--count", ram_count, "generate this many samples (default 5p)");
  ramified->add_flag("--uniform", ram_uniform, "generate uniform control samples");
  ramified->add_option("--bins", ram_bins, "centered | coarse");
  ramified->add_option("--alpha", alpha, "test level (default 1 - 1/(100 p))");
  ramified->add_option("--out", out_path, "report JSON path");

  auto* dual = attack->add_subcommand("dual", "dual circle attack on Q(zeta_p)");
  std::int64_t dual_p = 0;
  double dual_r_sqrtp = 0;
  std::size_t dual_count = 0;
  int dual_bins = 50;
  std::uint64_t dual_seed = 0;
  bool dual_uniform = false;
  std::string dual_obs;
  dual->add_option("--p", dual_p, "prime p")->required();
  dual->add_option("--r-sqrtp", dual_r_sqrtp, "r * sqrt(p)");
  dual->add_option("--count", dual_count, "observations (default 5p)");
  dual->add_option("--bins", dual_bins, "circle bins (50-400)");
  dual->add_option("--seed", dual_seed, "RNG seed");
  dual->add_flag("--uniform", dual_uniform, "uniform control observations");
  dual->add_option("--observations", dual_obs, "observation CSV instead of generating");
  dual->add_option("--alpha", alpha, "test level (default 0.99)");
  dual->add_option("--out", out_path, "report JSON path");

  auto* modswitch = attack->add_subcommand("modswitch", "modulus-switching experiment from q down to p");
  FieldArgs ms_field;
  ms_field.add(modswitch);
  std::int64_t ms_p = 0;
  std::size_t ms_count = 0;
  double ms_tau = 0;
  bool ms_no_direct = false;
  modswitch->add_option("--to", ms_p, "weak modulus p < q")->required();
  modswitch->add_option("--count", ms_count, "samples")->required();
  modswitch->add_option("--tau", ms_tau, "rounding width (default: instance sigma)");
  modswitch->add_option("--alpha", alpha, "test level (default 1 - 1/(100 N))");
  modswitch->add_flag("--no-direct", ms_no_direct, "skip the direct attack at p");
  modswitch->add_option("--out", out_path, "report JSON path");

  // scan
  auto* scan = app.add_subcommand("scan", "vulnerability search over candidate fields");
  std::string scan_candidates, scan_out;
  std::int64_t scan_m = 0;
  std::string scan_gens;
  ScanOptions scan_opt;
  scan->add_option("--candidates", scan_candidates, "JSON list of {\"m\", \"gens\"}");
  scan->add_option("--m", scan_m, "single candidate conductor");
  scan->add_option("--gens", scan_gens, "single candidate generators");
  scan->add_option("--q-lo", scan_opt.q_lo, "primes q > q-lo");
  scan->add_option("--q-hi", scan_opt.q_hi, "primes q < q-hi");
  scan->add_option("--f", scan_opt.f_target, "residue degree");
  scan->add_option("--sigma0", scan_opt.sigma0, "relative width");
  scan->add_option("--alpha", scan_opt.alpha, "test level (default 1 - 1/(10N))");
  scan->add_option("--delta-samples", scan_opt.delta_samples, "errors used to estimate Delta");
  scan->add_option("--max-samples", scan_opt.max_samples, "sample budget per instance");
  scan->add_option("--seed", scan_opt.seed, "RNG seed");
  scan->add_flag("--estimate-only", scan_opt.estimate_only, "estimate success without attacking");
  std::string scan_bins = "per-element";
  scan->add_option("--bins", scan_bins, "per-element | two-bin");
  scan->add_option("--out", scan_out, "CSV path");

  // bound-curve
  auto* curve = app.add_subcommand("bound-curve", "success bound as a function of Delta, as CSV");
  std::int64_t curve_N = 0, curve_M = 0;
  double curve_alpha = 0, curve_max = 0.1;
  int curve_steps = 50;
  curve->add_option("--N", curve_N, "number of guesses")->required();
  curve->add_option("--M", curve_M, "number of samples")->required();
  curve->add_option("--alpha", curve_alpha, "test level (default 1 - 1/(10N))");
  curve->add_option("--delta-max", curve_max, "largest Delta");
  curve->add_option("--steps", curve_steps, "grid points");
  curve->add_option("--out", out_path, "CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (!gen_field.seed_given) throw Error(ErrorCode::kInvalidArgument, "--seed is required for gen");
      if (gen_r_sqrtp > 0) {
        if (gen_field.p <= 0) throw Error(ErrorCode::kInvalidArgument, "--r-sqrtp needs --p");
        InstanceParams params;
        params.m = gen_field.p;
        params.gens = {1};
        params.prime_cyclotomic = true;
        params.r = gen_r_sqrtp / std::sqrt(static_cast<double>(gen_field.p));
        params.q = gen_field.q > 0 ? gen_field.q : gen_field.p;
        params.seed = gen_field.seed;
        write_instance(gen_instance_out, params);
        GenerationOptions opt{params.seed, threads, 0};
        std::vector<double> obs;
        if (gen_uniform) {
          obs.resize(gen_count);
          for (std::size_t i = 0; i < gen_count; ++i) {
            Stream rng(params.seed, stream_id(StreamTag::kUniform, i));
            obs[i] = std::uniform_real_distribution<double>(0.0, static_cast<double>(params.m))(rng);
          }
        } else {
          obs = generate_dual_observations(params.m, params.r, gen_count, opt);
        }
        SampleFileHeader h{instance_hash(params), gen_uniform ? "uniform" : "dual", 1, params.m, gen_count};
        write_observations(gen_samples_out, h, obs);
        std::cout << "r = " << params.r << "\nobservations: " << gen_count << "\nhash: " << hash_hex(h.hash) << "\n";
        return 0;
      }
      InstanceParams params = gen_field.params();
      RlweInstance inst = RlweInstance::create(params);
      write_instance(gen_instance_out, params);
      GenerationOptions opt{params.seed, threads, 0};
      auto samples = gen_uniform ? generate_uniform_samples(inst.degree(), inst.modulus(), gen_count, opt)
                                 : generate_samples(inst, gen_count, opt);
      SampleFileHeader h{instance_hash(params), gen_uniform ? "uniform" : "rlwe", inst.degree(), inst.modulus(),
                         gen_count};
      write_samples(gen_samples_out, h, samples);
      const auto& norms = inst.lattice().gs_norms;
      std::cout << "n = " << inst.degree() << "\nsigma0 = " << inst.sigma0() << "\nsigma = " << inst.sigma()
                << "\n|d_K|^(1/2n) = " << std::exp(inst.geometry().log_disc_abs / (2.0 * inst.degree()))
                << "\ngs norms: min " << norms.minCoeff() << " max " << norms.maxCoeff() << " geomean "
                << std::exp(inst.geometry().gs_log_mean) << "\nhash: " << hash_hex(h.hash) << "\n";
      return 0;
    }

    if (decision->parsed()) {
      InstanceParams params = dec_field.params();
      RlweInstance inst = RlweInstance::create(params);
      auto samples = load_or_generate(inst, params, dec_samples, dec_count, dec_uniform, threads);
      ResidueContext ctx = ResidueContext::build(inst.field(), inst.modulus());
      BinSpec bins = make_bins(parse_bins(dec_bins), ctx);
      double a = alpha > 0 ? alpha : default_alpha(ctx.subfield().size());
      AttackReport rep = chi_square_attack(ctx, reduce_samples(ctx, samples, dec_twist, threads), a, bins,
                                           GuessLoopOptions{threads, dec_keep, dec_early});
      rep.seed = params.seed;
      rep.params["instance"] = instance_to_json(params);
      rep.params["twist"] = dec_twist;
      std::uint32_t truth = true_residue(inst, ctx, dec_twist);
      rep.details["true_residue"] = truth;
      rep.details["correct"] = rep.verdict == Verdict::kGuess && rep.guess == truth;
      emit(report_to_json(rep), out_path);
      return 0;
    }

    if (search->parsed()) {
      InstanceParams params = search_field.params();
      RlweInstance inst = RlweInstance::create(params);
      auto samples = load_or_generate(inst, params, search_samples, search_count, false, threads);
      ResidueContext ctx = ResidueContext::build(inst.field(), inst.modulus());
      const double N = ctx.subfield().size();
      const double g = static_cast<double>(inst.degree()) / ctx.residue_degree();
      double a = alpha > 0 ? alpha : 1.0 - 1.0 / (100.0 * N * g);
      SearchResult res = search_attack(inst, ctx, samples, a, parse_bins(search_bins), GuessLoopOptions{threads});
      nlohmann::json j;
      j["status"] = search_status_name(res.status);
      j["verdict"] = res.status == SearchStatus::kRecovered ? "Recovered" : search_status_name(res.status);
      if (res.secret) {
        j["secret"] = std::vector<std::int64_t>(res.secret->data(), res.secret->data() + res.secret->size());
        j["matches_planted"] = *res.secret == inst.secret();
      }
      j["twists"] = res.twists;
      j["failed_twists"] = res.failed_twists;
      nlohmann::json reps = nlohmann::json::array();
      for (const auto& r : res.reports) reps.push_back(report_to_json(r));
      j["reports"] = reps;
      j["params"] = {{"instance", instance_to_json(params)}, {"alpha", a}, {"samples", samples.size()}};
      j["timings"] = {{"total", res.seconds}};
      j["seed"] = params.seed;
      emit(j, out_path);
      return 0;
    }

    if (ramified->parsed()) {
      InstanceParams params = ram_field.params();
      if (!params.prime_cyclotomic) throw Error(ErrorCode::kInvalidArgument, "ramified attack needs --p");
      auto start = std::chrono::steady_clock::now();
      RlweInstance inst = RlweInstance::create(params);
      std::size_t count = ram_count > 0 ? ram_count : static_cast<std::size_t>(5 * params.m);
      auto samples = load_or_generate(inst, params, ram_samples, count, ram_uniform, threads);
      double gen_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      RamifiedOptions opt;
      opt.alpha = alpha;
      opt.primary = parse_bins(ram_bins);
      opt.threads = threads;
      AttackReport rep = ramified_decision_attack(params.m, samples, opt);
      rep.seed = params.seed;
      rep.params["instance"] = instance_to_json(params);
      rep.params["uniform_control"] = ram_uniform;
      rep.timings.emplace_back("setup_and_samples", gen_secs);
      emit(report_to_json(rep), out_path);
      return 0;
    }

    if (dual->parsed()) {
      std::vector<double> obs;
      std::size_t count = dual_count > 0 ? dual_count : static_cast<std::size_t>(5 * dual_p);
      const double r = dual_r_sqrtp / std::sqrt(static_cast<double>(dual_p));
      if (!dual_obs.empty()) {
        obs = read_observations(dual_obs);
      } else if (dual_uniform) {
        obs.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
          Stream rng(dual_seed, stream_id(StreamTag::kUniform, i));
          obs[i] = std::uniform_real_distribution<double>(0.0, static_cast<double>(dual_p))(rng);
        }
      } else {
        if (!(dual_r_sqrtp > 0)) throw Error(ErrorCode::kInvalidArgument, "--r-sqrtp is required");
        obs = generate_dual_observations(dual_p, r, count, GenerationOptions{dual_seed, threads, 0});
      }
      AttackReport rep = dual_decision_attack(dual_p, obs, dual_bins, alpha > 0 ? alpha : kDualDefaultAlpha);
      rep.seed = dual_seed;
      rep.params["r_sqrtp"] = dual_r_sqrtp;
      rep.params["uniform_control"] = dual_uniform;
      rep.details["success"] = rep.verdict == Verdict::kNonUniform;
      emit(report_to_json(rep), out_path);
      return 0;
    }

    if (modswitch->parsed()) {
      InstanceParams params = ms_field.params();
      RlweInstance inst = RlweInstance::create(params);
      ModSwitchOptions opt;
      opt.tau = ms_tau;
      opt.alpha = alpha;
      opt.direct_attack = !ms_no_direct;
      opt.threads = threads;
      opt.seed = params.seed;
      ModSwitchResult res = modulus_switch_experiment(inst, ms_p, ms_count, opt);
      nlohmann::json j = modswitch_to_json(res);
      j["verdict"] = verdict_name(res.switched.verdict);
      j["params"] = {{"instance", instance_to_json(params)}, {"p", ms_p}, {"samples", ms_count}};
      j["seed"] = params.seed;
      emit(j, out_path);
      return 0;
    }

    if (scan->parsed()) {
      std::vector<ScanCandidate> cands;
      if (!scan_candidates.empty()) {
        std::ifstream in(scan_candidates);
        if (!in) throw Error(ErrorCode::kIo, "cannot open " + scan_candidates);
        nlohmann::json j = nlohmann::json::parse(in);
        for (const auto& c : j) cands.push_back({c.at("m").get<std::int64_t>(), c.at("gens").get<std::vector<std::int64_t>>()});
      }
      if (scan_m > 0) cands.push_back({scan_m, FieldArgs::parse_list(scan_gens)});
      scan_opt.threads = threads;
      scan_opt.bins = parse_bins(scan_bins);
      auto rows = vulnerability_search(cands, scan_opt);
      std::string csv = scan_csv_header() + "\n";
      for (const auto& row : rows) csv += scan_row_csv(row) + "\n";
      if (scan_out.empty()) {
        std::cout << csv;
      } else {
        write_text(scan_out, csv);
      }
      return 0;
    }

    if (curve->parsed()) {
      double a = curve_alpha > 0 ? curve_alpha : default_alpha(static_cast<std::uint64_t>(curve_N));
      std::ostringstream os;
      os << "delta,bound\n";
      for (int i = 0; i <= curve_steps; ++i) {
        double d = curve_max * i / curve_steps;
        os << d << ',' << success_lower_bound(curve_N, curve_M, d, a) << '\n';
      }
      if (out_path.empty()) {
        std::cout << os.str();
      } else {
        write_text(out_path, os.str());
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInsufficientSamples ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
