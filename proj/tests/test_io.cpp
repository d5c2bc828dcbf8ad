#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rlwe/errors.hpp"
#include "rlwe/io.hpp"

using rlwe::ErrorCode;
using rlwe::InstanceParams;
using rlwe::RlweSample;
using rlwe::SampleFileHeader;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "rlwe_forge_test_io";
  fs::create_directories(dir);
  return dir;
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

InstanceParams example_params() {
  InstanceParams p;
  p.m = 2805;
  p.gens = {1684, 1618};
  p.q = 67;
  p.sigma0 = 1.0;
  p.seed = 9;
  return p;
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(rlwe::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(rlwe::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(rlwe::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(rlwe::hash_hex(0xabcULL) == "0000000000000abc");
}

TEST_CASE("instance files round trip") {
  const fs::path path = scratch_dir() / "inst.json";
  auto p = example_params();
  rlwe::write_instance(path, p);
  auto back = rlwe::read_instance(path);
  CHECK(back.m == p.m);
  CHECK(back.gens == p.gens);
  CHECK(back.q == p.q);
  CHECK(back.seed == p.seed);
  CHECK(rlwe::instance_hash(back) == rlwe::instance_hash(p));

  auto prime = InstanceParams::prime_cyclotomic_field(251, 251, 0.5, 3);
  auto pj = rlwe::instance_to_json(prime);
  CHECK(pj.contains("p"));
  CHECK_FALSE(pj.contains("H_gens"));
  auto prime_back = rlwe::instance_from_json(pj);
  CHECK(prime_back.prime_cyclotomic);
  CHECK(prime_back.q == 251);

  InstanceParams absolute = p;
  absolute.sigma_mode = rlwe::SigmaMode::kAbsolute;
  absolute.sigma0 = 0.05;
  auto aj = rlwe::instance_to_json(absolute);
  CHECK(aj.contains("sigma"));
  CHECK(rlwe::instance_from_json(aj).sigma_mode == rlwe::SigmaMode::kAbsolute);

  // Any parameter change moves the hash.
  InstanceParams other = p;
  other.seed = 10;
  CHECK(rlwe::instance_hash(other) != rlwe::instance_hash(p));
}

TEST_CASE("malformed instances") {
  CHECK(code_of([] { rlwe::instance_from_json(nlohmann::json{{"q", 3}}); }) == ErrorCode::kIo);
  auto j = rlwe::instance_to_json(example_params());
  j["secret_mode"] = "ternary";
  CHECK(code_of([&] { rlwe::instance_from_json(j); }) == ErrorCode::kInvalidArgument);
  const fs::path path = scratch_dir() / "broken.json";
  rlwe::write_text(path, "{ not json");
  CHECK(code_of([&] { rlwe::read_instance(path); }) == ErrorCode::kIo);
  CHECK(code_of([] { rlwe::read_instance("/nonexistent/dir/x.json"); }) == ErrorCode::kIo);
}

TEST_CASE("sample files round trip and reject the wrong instance") {
  const fs::path path = scratch_dir() / "samples.csv";
  std::vector<RlweSample> samples(3);
  for (int i = 0; i < 3; ++i) {
    samples[i].a = rlwe::IntVector::Constant(4, i);
    samples[i].b.resize(4);
    samples[i].b << -i, 7 * i, 66, -1000000007LL * i;
  }
  SampleFileHeader h{rlwe::instance_hash(example_params()), "rlwe", 4, 67, samples.size()};
  rlwe::write_samples(path, h, samples);

  SampleFileHeader got;
  auto back = rlwe::read_samples(path, &got, h.hash);
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(back[i].a == samples[i].a);
    CHECK(back[i].b == samples[i].b);
  }
  CHECK(got.source == "rlwe");
  CHECK(got.n == 4);
  CHECK(got.q == 67);
  CHECK(rlwe::format_header(got) == rlwe::format_header(h));

  CHECK(code_of([&] { rlwe::read_samples(path, nullptr, h.hash + 1); }) == ErrorCode::kHashMismatch);

  // Header count disagreeing with the rows.
  SampleFileHeader wrong = h;
  wrong.count = 5;
  rlwe::write_samples(path, wrong, samples);
  CHECK(code_of([&] { rlwe::read_samples(path); }) == ErrorCode::kIo);

  rlwe::write_text(path, rlwe::format_header(h) + "\n1,2,x,4,5,6,7,8\n");
  CHECK(code_of([&] { rlwe::read_samples(path); }) == ErrorCode::kIo);
  rlwe::write_text(path, "1,2,3\n");
  CHECK(code_of([&] { rlwe::read_samples(path); }) == ErrorCode::kIo);
}

TEST_CASE("observation files keep doubles exactly") {
  const fs::path path = scratch_dir() / "obs.csv";
  std::vector<double> values{0.0, 1.0 / 3.0, 306.99999999999994, 1e-300, 123.456};
  SampleFileHeader h{42, "dual", 1, 307, values.size()};
  rlwe::write_observations(path, h, values);
  auto back = rlwe::read_observations(path, nullptr, 42);
  CHECK(back == values);
  CHECK(code_of([&] { rlwe::read_observations(path, nullptr, 43); }) == ErrorCode::kHashMismatch);
}
