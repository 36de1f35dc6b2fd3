#pragma once

// On-disk form of a realization:
//   manifest.json  {format, version, seed, range: [lo, hi], n_min, members, bitset, bit_order, member_list?}
//   members.bits   ceil((hi-lo+1)/8) bytes; bit i (LSB first) of byte b is n = lo + 8b + i
//   members.txt    one member per line, optional

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cgmodel/sampler.hpp"

namespace cgmodel {

inline constexpr const char* kSampleManifestFormat = "cgmodel-sample";

nlohmann::json sample_manifest(const SampledSet& sample, bool member_list);

/// Byte serialization described above.
std::string bitset_bytes(const SampledSet& sample);

/// Writes manifest.json, members.bits and (optionally) members.txt into dir.
void write_sample_files(const SampledSet& sample, const std::filesystem::path& dir, bool member_list);

/// Reads the manifest and bitset back; ValidationError on inconsistencies.
SampledSet read_sample_files(const std::filesystem::path& dir);

}  // namespace cgmodel
