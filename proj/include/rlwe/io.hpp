#pragma once

// Instance, sample and observation files.  Every file carries the FNV-1a hash
// of the canonical instance JSON so mismatched inputs are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rlwe/rlwe.hpp"

namespace rlwe {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

nlohmann::json instance_to_json(const InstanceParams& p);
InstanceParams instance_from_json(const nlohmann::json& j);
/// Hash of instance_to_json(p).dump().
std::uint64_t instance_hash(const InstanceParams& p);

void write_instance(const std::filesystem::path& path, const InstanceParams& p);
InstanceParams read_instance(const std::filesystem::path& path);

struct SampleFileHeader {
  std::uint64_t hash = 0;
  std::string source;  // rlwe | uniform | dual
  int n = 0;
  std::int64_t q = 0;
  std::size_t count = 0;
};

std::string format_header(const SampleFileHeader& h);
SampleFileHeader parse_header(const std::string& line);

std::string samples_to_csv(const SampleFileHeader& h, const std::vector<RlweSample>& samples);
void write_samples(const std::filesystem::path& path, const SampleFileHeader& h, const std::vector<RlweSample>& samples);
/// Throws HashMismatch when expected_hash is given and differs from the file.
std::vector<RlweSample> read_samples(const std::filesystem::path& path, SampleFileHeader* header = nullptr,
                                     std::optional<std::uint64_t> expected_hash = std::nullopt);

std::string observations_to_csv(const SampleFileHeader& h, const std::vector<double>& values);
void write_observations(const std::filesystem::path& path, const SampleFileHeader& h, const std::vector<double>& values);
std::vector<double> read_observations(const std::filesystem::path& path, SampleFileHeader* header = nullptr,
                                      std::optional<std::uint64_t> expected_hash = std::nullopt);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rlwe
