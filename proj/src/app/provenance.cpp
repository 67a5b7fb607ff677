#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gcgail/app.hpp"
#include "gcgail/errors.hpp"

#ifndef GCGAIL_VERSION
#define GCGAIL_VERSION "unknown"
#endif

namespace gcgail::app {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(const std::exception& e) {
  if (dynamic_cast<const IncompleteMatrix*>(&e)) return kIncompleteMatrix;
  if (dynamic_cast<const CompatibilityError*>(&e)) return kCompatibilityError;
  if (dynamic_cast<const TrainingAborted*>(&e) || dynamic_cast<const NumericError*>(&e)) {
    return kTrainingError;
  }
  return kInputError;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create " + p.parent_path().string() + ": " + ec.message());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + p.string());
}

std::string file_sha256(const fs::path& p) { return sha256_hex(read_file(p)); }

std::string git_describe() { return GCGAIL_VERSION; }

json write_provenance(const fs::path& dir, const std::string& command, const json& config,
                      std::uint64_t seed, const std::vector<std::string>& files) {
  json hashes = json::object();
  std::string all;
  for (const auto& f : files) {
    const auto h = file_sha256(dir / f);
    hashes[f] = h;
    all += h;
  }
  json j = {{"command", command},
            {"version", git_describe()},
            {"seed", seed},
            {"config", config},
            {"files", hashes},
            {"content_hash", sha256_hex(all)}};
  write_file(dir / "provenance.json", j.dump(2) + "\n");
  return j;
}

namespace {

constexpr std::string_view kExperimentKeys[] = {"models", "scenarios", "seeds", "data_dir"};

}  // namespace

std::span<const std::string_view> experiment_keys() { return kExperimentKeys; }

panel::KvFile load_config(const std::optional<std::string>& path) {
  panel::KvFile kv;
  if (path) {
    kv = panel::KvFile::load(*path);
  } else {
    std::istringstream empty;
    kv = panel::KvFile::parse(empty, "<defaults>");
  }
  std::vector<std::string_view> allowed;
  for (auto k : panel::GeneratorConfig::keys()) allowed.push_back(k);
  for (auto k : trainers::TrainConfig::keys()) allowed.push_back(k);
  for (auto k : experiment_keys()) allowed.push_back(k);
  kv.require_known(allowed);
  return kv;
}

}  // namespace gcgail::app
