#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "gcgail/app.hpp"

namespace gcgail::app::detail {

// Promotion settings echoed into a data directory's provenance.json.
panel::PromotionConfig promotion_of_data(const std::filesystem::path& data_dir);

std::vector<mdp::ExpertTrajectory> load_trajectories(const std::filesystem::path& data_dir);

std::vector<std::string_view> keys_except_generator();

std::filesystem::path run_dir(const std::filesystem::path& out, const std::string& model,
                              const std::string& scenario, std::uint64_t seed);

inline void note(bool quiet, const std::string& msg) {
  if (!quiet) std::cerr << msg << '\n';
}

}  // namespace gcgail::app::detail
