#include <sstream>

#include "common.hpp"
#include "gcgail/errors.hpp"

namespace gcgail::app {

namespace fs = std::filesystem;

namespace detail {

panel::PromotionConfig promotion_of_data(const fs::path& data_dir) {
  const auto path = data_dir / "provenance.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    const auto& c = j.at("config");
    panel::PromotionConfig p;
    p.n_stations = c.at("n_stations").get<int>();
    p.discount_stations = c.at("discount_stations").get<std::vector<int>>();
    const auto launch = c.at("launch").get<std::string>();
    const auto d = panel::parse_iso_date(launch + "-01");
    p.launch = d.year() / d.month();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": missing promotion settings: " + e.what());
  }
}

std::vector<mdp::ExpertTrajectory> load_trajectories(const fs::path& data_dir) {
  std::istringstream in(read_file(data_dir / "trajectories.jsonl"));
  return panel::read_trajectories(in);
}

std::vector<std::string_view> keys_except_generator() {
  std::vector<std::string_view> keys;
  for (auto k : trainers::TrainConfig::keys()) keys.push_back(k);
  for (auto k : experiment_keys()) keys.push_back(k);
  return keys;
}

fs::path run_dir(const fs::path& out, const std::string& model, const std::string& scenario,
                 std::uint64_t seed) {
  return out / model / scenario / std::to_string(seed);
}

}  // namespace detail

GenOutput cmd_gen(const GenOptions& opt) {
  const auto kv = load_config(opt.config);
  const auto cfg = panel::GeneratorConfig::from_kv(kv, detail::keys_except_generator());
  const auto promo = cfg.promotion();
  const auto pop = panel::synthesize_population(cfg, opt.seed);
  const auto ex = panel::extract_features(pop.trips, promo);

  const fs::path dir(opt.out);
  std::ostringstream trips, trajs, profiles;
  panel::write_trips_csv(trips, pop.trips);
  panel::write_trajectories(trajs, ex.trajectories);
  panel::write_profiles(profiles, pop.profiles);
  write_file(dir / "trips.csv", trips.str());
  write_file(dir / "trajectories.jsonl", trajs.str());
  write_file(dir / "profiles.jsonl", profiles.str());

  auto config = cfg.to_json();
  config["excluded_passengers"] = ex.excluded;
  const auto prov = write_provenance(dir, "gen", config, opt.seed,
                                     {"trips.csv", "trajectories.jsonl", "profiles.jsonl"});
  GenOutput out;
  out.content_hash = prov.at("content_hash").get<std::string>();
  out.passengers = pop.profiles.size();
  out.trajectories = ex.trajectories.size();
  out.excluded = ex.excluded;
  detail::note(opt.quiet, "gen: " + std::to_string(out.trajectories) + " trajectories (" +
                              std::to_string(out.excluded) + " excluded) -> " + dir.string());
  return out;
}

}  // namespace gcgail::app
