#include "rlwe/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rlwe/errors.hpp"

namespace rlwe {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void check_hash(const SampleFileHeader& h, std::optional<std::uint64_t> expected, const std::filesystem::path& path) {
  if (expected && *expected != h.hash) {
    throw Error(ErrorCode::kHashMismatch,
                path.string() + " has hash " + hash_hex(h.hash) + ", expected " + hash_hex(*expected));
  }
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::kIo, "bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json instance_to_json(const InstanceParams& p) {
  nlohmann::json j;
  if (p.r > 0) {
    j["p"] = p.m;
    j["r"] = p.r;
    j["seed"] = p.seed;
    return j;
  }
  if (p.prime_cyclotomic) {
    j["p"] = p.m;
  } else {
    j["m"] = p.m;
    j["H_gens"] = p.gens;
  }
  j["q"] = p.q;
  if (p.sigma_mode == SigmaMode::kAbsolute) {
    j["sigma"] = p.sigma0;
  } else {
    j["sigma0"] = p.sigma0;
  }
  j["secret_mode"] = p.secret_mode == SecretMode::kUniform ? "uniform" : "gaussian";
  j["seed"] = p.seed;
  if (p.precision_bits > 0) j["precision_bits"] = p.precision_bits;
  return j;
}

InstanceParams instance_from_json(const nlohmann::json& j) {
  try {
    InstanceParams p;
    if (j.contains("p")) {
      p.m = j.at("p").get<std::int64_t>();
      p.gens = {1};
      p.prime_cyclotomic = true;
    } else {
      p.m = j.at("m").get<std::int64_t>();
      p.gens = j.at("H_gens").get<std::vector<std::int64_t>>();
    }
    p.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("r")) {
      p.r = j.at("r").get<double>();
      p.q = j.value("q", p.m);
      return p;
    }
    p.q = j.value("q", p.prime_cyclotomic ? p.m : std::int64_t{0});
    if (j.contains("sigma")) {
      p.sigma0 = j.at("sigma").get<double>();
      p.sigma_mode = SigmaMode::kAbsolute;
    } else {
      p.sigma0 = j.value("sigma0", 1.0);
    }
    std::string mode = j.value("secret_mode", std::string("uniform"));
    if (mode == "uniform") {
      p.secret_mode = SecretMode::kUniform;
    } else if (mode == "gaussian") {
      p.secret_mode = SecretMode::kGaussian;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown secret_mode '" + mode + "'");
    }
    p.precision_bits = j.value("precision_bits", 0);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed instance: ") + e.what());
  }
}

std::uint64_t instance_hash(const InstanceParams& p) { return fnv1a64(instance_to_json(p).dump()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void write_instance(const std::filesystem::path& path, const InstanceParams& p) {
  write_text(path, instance_to_json(p).dump(2) + "\n");
}

InstanceParams read_instance(const std::filesystem::path& path) {
  try {
    return instance_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, path.string() + ": " + e.what());
  }
}

std::string format_header(const SampleFileHeader& h) {
  std::ostringstream os;
  os << "# hash=" << hash_hex(h.hash) << " source=" << h.source << " n=" << h.n << " q=" << h.q
     << " count=" << h.count;
  return os.str();
}

SampleFileHeader parse_header(const std::string& line) {
  if (line.rfind("# ", 0) != 0) throw Error(ErrorCode::kIo, "missing header line");
  SampleFileHeader h;
  std::istringstream is(line.substr(2));
  std::string token;
  bool have_hash = false;
  while (is >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    std::string key = token.substr(0, eq);
    std::string value = token.substr(eq + 1);
    if (key == "hash") {
      h.hash = std::stoull(value, nullptr, 16);
      have_hash = true;
    } else if (key == "source") {
      h.source = value;
    } else if (key == "n") {
      h.n = static_cast<int>(parse_int(value));
    } else if (key == "q") {
      h.q = parse_int(value);
    } else if (key == "count") {
      h.count = static_cast<std::size_t>(parse_int(value));
    }
  }
  if (!have_hash) throw Error(ErrorCode::kIo, "header has no hash");
  return h;
}

std::string samples_to_csv(const SampleFileHeader& h, const std::vector<RlweSample>& samples) {
  std::string out = format_header(h);
  out += '\n';
  char buf[32];
  for (const auto& s : samples) {
    bool first = true;
    for (const IntVector* v : {&s.a, &s.b}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        if (!first) out += ',';
        first = false;
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, (*v)(i));
        out.append(buf, ptr);
      }
    }
    out += '\n';
  }
  return out;
}

void write_samples(const std::filesystem::path& path, const SampleFileHeader& h,
                   const std::vector<RlweSample>& samples) {
  write_text(path, samples_to_csv(h, samples));
}

std::vector<RlweSample> read_samples(const std::filesystem::path& path, SampleFileHeader* header,
                                     std::optional<std::uint64_t> expected_hash) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIo, path.string() + " is empty");
  SampleFileHeader h = parse_header(line);
  check_hash(h, expected_hash, path);
  std::vector<RlweSample> out;
  out.reserve(h.count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::int64_t> vals;
    std::string_view rest(line);
    while (true) {
      auto comma = rest.find(',');
      vals.push_back(parse_int(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (vals.size() % 2 != 0 || (h.n > 0 && vals.size() != static_cast<std::size_t>(2 * h.n)))
      throw Error(ErrorCode::kIo, path.string() + ": row has " + std::to_string(vals.size()) + " entries");
    const auto n = static_cast<Eigen::Index>(vals.size() / 2);
    RlweSample s;
    s.a = Eigen::Map<IntVector>(vals.data(), n);
    s.b = Eigen::Map<IntVector>(vals.data() + n, n);
    out.push_back(std::move(s));
  }
  if (h.count != out.size())
    throw Error(ErrorCode::kIo, path.string() + ": header count " + std::to_string(h.count) + " but " +
                                    std::to_string(out.size()) + " rows");
  if (header != nullptr) *header = h;
  return out;
}

std::string observations_to_csv(const SampleFileHeader& h, const std::vector<double>& values) {
  std::string out = format_header(h);
  out += '\n';
  char buf[40];
  for (double v : values) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

void write_observations(const std::filesystem::path& path, const SampleFileHeader& h,
                        const std::vector<double>& values) {
  write_text(path, observations_to_csv(h, values));
}

std::vector<double> read_observations(const std::filesystem::path& path, SampleFileHeader* header,
                                      std::optional<std::uint64_t> expected_hash) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIo, path.string() + " is empty");
  SampleFileHeader h = parse_header(line);
  check_hash(h, expected_hash, path);
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc()) throw Error(ErrorCode::kIo, path.string() + ": bad value '" + line + "'");
    out.push_back(v);
  }
  if (h.count != out.size()) throw Error(ErrorCode::kIo, path.string() + ": row count does not match header");
  if (header != nullptr) *header = h;
  return out;
}

}  // namespace rlwe
