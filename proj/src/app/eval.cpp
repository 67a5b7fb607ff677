#include "common.hpp"
#include "gcgail/errors.hpp"

namespace gcgail::app {

namespace fs = std::filesystem;

std::vector<eval::SampleRecord> test_records(const trainers::Model& model,
                                             std::span<const mdp::ExpertTrajectory> test,
                                             const panel::PromotionConfig& promo,
                                             const std::string& scenario) {
  const auto adopters = panel::classify_adopters(test);
  std::vector<eval::SampleRecord> records;
  for (const auto& t : test) {
    const auto types = adopters.at(t.passenger_id);
    for (const auto& o : t.observations) {
      eval::SampleRecord r;
      r.passenger_id = t.passenger_id;
      r.month = o.month_index;
      r.station = o.state.l_work;
      r.discount_station = promo.is_discount_station(r.station);
      r.types = types;
      r.scenario = scenario;
      r.prediction = mdp::to_int(
          trainers::predict_action(model.policy, model.normalizer, o.state, t.condition, model.mode));
      r.label = mdp::to_int(o.action);
      records.push_back(r);
    }
  }
  return records;
}

fs::path cmd_eval(const EvalOptions& opt) {
  const fs::path ckpt_path(opt.checkpoint);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(ckpt_path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(ckpt_path.string() + ": " + e.what());
  }
  const auto model = trainers::checkpoint_from_json(j);
  if (opt.model) {
    const auto wanted = trainers::default_mode(trainers::parse_model(*opt.model));
    if (wanted != model.mode) {
      throw CompatibilityError("checkpoint " + ckpt_path.string() + " was trained with " +
                               mdp::mode_name(model.mode) + " inputs, but " + *opt.model +
                               " needs " + mdp::mode_name(wanted));
    }
  }
  std::uint64_t seed = 0;
  std::string scenario = "full";
  if (j.contains("run")) {
    seed = j["run"].value("seed", std::uint64_t{0});
    scenario = j["run"].value("scenario", scenario);
  }

  const fs::path data(opt.data);
  const auto trajs = detail::load_trajectories(data);
  const auto promo = detail::promotion_of_data(data);
  if (j.contains("run") && j["run"].contains("data_hash") &&
      j["run"]["data_hash"].get<std::string>() != file_sha256(data / "trajectories.jsonl")) {
    throw CompatibilityError("checkpoint " + ckpt_path.string() + " was trained on different data than " +
                             data.string());
  }
  // The test split does not depend on the scenario.
  const auto split = panel::split_and_filter(trajs, panel::Scenario{}, seed, promo);
  const auto records = test_records(model, split.test, promo, scenario);

  const fs::path out = opt.out ? fs::path(*opt.out) : ckpt_path.parent_path() / "eval";
  const auto files = eval::write_reports(out.string(), records);
  write_provenance(out, "eval",
                   {{"checkpoint", ckpt_path.string()},
                    {"checkpoint_sha256", file_sha256(ckpt_path)},
                    {"data", data.string()},
                    {"scenario", scenario}},
                   seed, files);
  detail::note(opt.quiet, "eval: " + std::to_string(records.size()) + " test samples -> " + out.string());
  return out;
}

}  // namespace gcgail::app
