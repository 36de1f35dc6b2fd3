#include "cgmodel/sample_io.hpp"

#include <fstream>
#include <sstream>

#include "cgmodel/error.hpp"
#include "cgmodel/version.hpp"

namespace cgmodel {

nlohmann::json sample_manifest(const SampledSet& sample, bool member_list) {
  nlohmann::json j;
  j["format"] = kSampleManifestFormat;
  j["version"] = std::string(kLibraryVersion);
  j["seed"] = sample.parameters().seed;
  j["range"] = {sample.lo(), sample.hi()};
  j["n_min"] = sample.parameters().n_min;
  j["members"] = sample.count();
  j["bitset"] = "members.bits";
  j["bit_order"] = "lsb-first";
  if (member_list) j["member_list"] = "members.txt";
  return j;
}

std::string bitset_bytes(const SampledSet& sample) {
  const std::uint64_t bits = sample.hi() - sample.lo() + 1;
  std::string out((bits + 7) / 8, '\0');
  const auto words = sample.words();
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b] = static_cast<char>((words[b / 8] >> (8 * (b % 8))) & 0xFFU);
  }
  return out;
}

void write_sample_files(const SampledSet& sample, const std::filesystem::path& dir, bool member_list) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << sample_manifest(sample, member_list).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "members.bits", std::ios::binary);
    const std::string bytes = bitset_bytes(sample);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (member_list) {
    std::ofstream out(dir / "members.txt", std::ios::binary);
    for (const std::uint64_t n : sample.members()) out << n << '\n';
  }
  if (!std::filesystem::exists(dir / "manifest.json")) {
    throw ValidationError("could not write sample files into " + dir.string());
  }
}

SampledSet read_sample_files(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ValidationError("missing " + (dir / "manifest.json").string());
  const auto j = nlohmann::json::parse(in);
  if (j.value("format", "") != kSampleManifestFormat) throw ValidationError("not a sample manifest");
  ModelParameters params{j.at("seed").get<std::uint64_t>(), j.at("n_min").get<std::uint64_t>()};
  const auto lo = j.at("range").at(0).get<std::uint64_t>();
  const auto hi = j.at("range").at(1).get<std::uint64_t>();
  std::ifstream bits(dir / j.at("bitset").get<std::string>(), std::ios::binary);
  std::stringstream buffer;
  buffer << bits.rdbuf();
  const std::string bytes = buffer.str();
  if (bytes.size() != (hi - lo + 1 + 7) / 8) throw ValidationError("bitset file length does not match the range");
  std::vector<std::uint64_t> words((hi - lo) / 64 + 1, 0);
  for (std::size_t b = 0; b < bytes.size(); ++b) {
    words[b / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b])) << (8 * (b % 8));
  }
  return SampledSet(params, lo, hi, std::move(words));
}

}  // namespace cgmodel
