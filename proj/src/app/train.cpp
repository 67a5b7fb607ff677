#include <sstream>

#include "common.hpp"
#include "gcgail/errors.hpp"

namespace gcgail::app {

namespace fs = std::filesystem;

fs::path cmd_train(const TrainOptions& opt) {
  const auto kv = load_config(opt.config);
  const auto kind = trainers::parse_model(opt.model);
  const auto scenario = panel::Scenario::parse(opt.scenario);
  trainers::TrainConfig cfg;
  cfg.apply(kv);
  cfg.seed = opt.seed;
  cfg.mode = trainers::default_mode(kind);

  const fs::path data(opt.data);
  const auto trajs = detail::load_trajectories(data);
  const auto promo = detail::promotion_of_data(data);
  const auto data_hash = file_sha256(data / "trajectories.jsonl");
  const auto split = panel::split_and_filter(trajs, scenario, opt.seed, promo);

  detail::note(opt.quiet, "train: " + opt.model + " on " + scenario.name() + " seed " +
                              std::to_string(opt.seed) + " (" + std::to_string(split.train.size()) +
                              " training passengers)");
  const auto result = kind == trainers::ModelKind::Bc ? trainers::train_bc(split.train, cfg)
                                                      : trainers::train_gail(split.train, cfg, kind);

  const fs::path dir = detail::run_dir(opt.out, opt.model, scenario.name(), opt.seed);
  std::ostringstream log;
  trainers::write_train_log(log,
                            {trainers::model_name(kind), scenario.name(),
                             scenario.excluded_groups(), opt.seed},
                            cfg, result.log);
  write_file(dir / "train_log.csv", log.str());

  nlohmann::json run = {{"scenario", scenario.name()},
                        {"excluded_groups", scenario.excluded_groups()},
                        {"seed", opt.seed},
                        {"data_hash", data_hash},
                        {"train_passengers", split.train.size()},
                        {"test_passengers", split.test.size()}};
  if (!split.kept_stations.empty()) run["kept_stations"] = split.kept_stations;

  if (result.abort_message) {
    write_provenance(dir, "train", {{"config", cfg.to_json()}, {"run", run}}, opt.seed,
                     {"train_log.csv"});
    throw TrainingAborted("training diverged at " + *result.abort_message + " (log: " +
                          (dir / "train_log.csv").string() + ")");
  }
  auto ckpt = trainers::checkpoint_to_json(result.model, cfg, &result);
  ckpt["run"] = run;
  write_file(dir / "checkpoint.json", ckpt.dump() + "\n");
  write_provenance(dir, "train", {{"config", cfg.to_json()}, {"run", run}}, opt.seed,
                   {"checkpoint.json", "train_log.csv"});
  detail::note(opt.quiet, "train: stopped (" + trainers::stop_reason_name(result.stop) + ") after " +
                              std::to_string(result.iterations) + " iterations, best " +
                              std::to_string(result.best_score) + " at " +
                              std::to_string(result.best_iteration) + " -> " + dir.string());
  return dir;
}

}  // namespace gcgail::app
