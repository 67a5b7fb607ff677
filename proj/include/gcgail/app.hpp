#pragma once

// Pipeline commands behind the gcgail executable. Each throws the typed
// errors of errors.hpp; exit_code() maps them onto the process contract.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcgail/evaluation.hpp"
#include "gcgail/panel.hpp"
#include "gcgail/trainers.hpp"

namespace gcgail::app {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kTrainingError = 3,
  kCompatibilityError = 4,
  kIncompleteMatrix = 5,
};

int exit_code(const std::exception& e);

// ---------------------------------------------------------------------------
// Provenance

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& p);
std::string git_describe();
std::string read_file(const std::filesystem::path& p);           // IoError
void write_file(const std::filesystem::path& p, std::string_view bytes);  // IoError

// Writes <dir>/provenance.json: command, config echo, seed, version string
// and the SHA-256 of every listed file (relative to dir).
nlohmann::json write_provenance(const std::filesystem::path& dir, const std::string& command,
                                const nlohmann::json& config, std::uint64_t seed,
                                const std::vector<std::string>& files);

// Keys shared by the experiment section of a configuration file.
std::span<const std::string_view> experiment_keys();

// Parses an optional configuration file accepting generator, training and
// experiment keys; unknown keys are a ConfigError.
panel::KvFile load_config(const std::optional<std::string>& path);

// ---------------------------------------------------------------------------
// Commands

struct GenOptions {
  std::optional<std::string> config;
  std::string out = "data";
  std::uint64_t seed = 0;
  bool quiet = false;
};

struct GenOutput {
  std::string content_hash;
  std::size_t passengers = 0;
  std::size_t trajectories = 0;
  int excluded = 0;
};

GenOutput cmd_gen(const GenOptions& opt);

struct TrainOptions {
  std::optional<std::string> config;
  std::string data = "data";
  std::string out = "runs";
  std::string model = "gcgail";
  std::string scenario = "full";
  std::uint64_t seed = 0;
  bool quiet = false;
};

// Returns the run directory out/<model>/<scenario>/<seed>.
std::filesystem::path cmd_train(const TrainOptions& opt);

struct EvalOptions {
  std::string checkpoint;
  std::string data = "data";
  std::optional<std::string> out;    // default: <checkpoint dir>/eval
  std::optional<std::string> model;  // requested conditioning; mismatch -> CompatibilityError
  bool quiet = false;
};

std::filesystem::path cmd_eval(const EvalOptions& opt);

// Model predictions on the untouched test split of `data` for the seed and
// promotion stored with the checkpoint.
std::vector<eval::SampleRecord> test_records(const trainers::Model& model,
                                             std::span<const mdp::ExpertTrajectory> test,
                                             const panel::PromotionConfig& promo,
                                             const std::string& scenario);

struct CompareOptions {
  std::optional<std::string> config;
  std::string out = "runs";
  bool run_missing = false;
  bool quiet = false;
};

struct CompareOutput {
  std::filesystem::path table;
  std::vector<std::string> ordering_lines;
};

CompareOutput cmd_compare(const CompareOptions& opt);

// "seed=0 order=gcgail>=cgail>=gail:true"
std::string ordering_line(std::uint64_t seed, const std::vector<std::string>& models,
                          const std::vector<double>& accuracies);

}  // namespace gcgail::app
